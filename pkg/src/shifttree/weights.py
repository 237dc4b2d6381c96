"""Weight sequences along rays: explicit prefix + periodic tail, or a named generator."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidWeights

__all__ = ["WeightSequence", "GENERATORS", "dyadic_blocks"]


def dyadic_blocks(idx):
    """lambda_k for k = idx + 1: 1/2 on blocks 2^n+1 <= k <= 3*2^(n-1) (n >= 2), else 1."""
    k = np.asarray(idx, dtype=np.int64) + 1
    out = np.ones(k.shape, dtype=float)
    big = k >= 5
    kb = k[big]
    # n = floor(log2(k - 1)) computed exactly on integers
    n = np.floor(np.log2(kb - 1)).astype(np.int64)
    n = np.where((1 << (n + 1)) <= kb - 1, n + 1, n)
    n = np.where((1 << n) > kb - 1, n - 1, n)
    half = (n >= 2) & (kb <= 3 * (1 << (n - 1)))
    vals = np.where(half, 0.5, 1.0)
    out[big] = vals
    return out


GENERATORS = {"dyadic_blocks": dyadic_blocks}


@dataclass(frozen=True)
class WeightSequence:
    """Infinite positive sequence w[0], w[1], ...

    Either ``prefix`` followed by ``period`` repeated forever, or ``prefix``
    followed by ``generator`` values ``g(offset + j) ** power``.
    """

    prefix: tuple = ()
    period: tuple | None = (1.0,)
    generator: str | None = None
    offset: int = 0
    power: int = 1

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(float(x) for x in self.prefix))
        if self.generator is not None:
            if self.generator not in GENERATORS:
                raise InvalidWeights(f"unknown weight generator {self.generator!r}")
            object.__setattr__(self, "period", None)
        else:
            if not self.period:
                raise InvalidWeights("periodic tail must be non-empty")
            object.__setattr__(self, "period", tuple(float(x) for x in self.period))
        for x in self.prefix + (self.period or ()):
            if not math.isfinite(x) or x < 0:
                raise InvalidWeights(f"weights must be finite and non-negative, got {x}")

    @classmethod
    def constant(cls, c: float) -> WeightSequence:
        return cls((), (c,))

    @property
    def periodic(self) -> bool:
        return self.generator is None

    def __getitem__(self, i: int) -> float:
        p = len(self.prefix)
        if i < p:
            return self.prefix[i]
        if self.periodic:
            return self.period[(i - p) % len(self.period)]
        return float(GENERATORS[self.generator](np.array([self.offset + i - p]))[0] ** self.power)

    def values(self, n: int) -> np.ndarray:
        """First ``n`` terms as a float array."""
        idx = np.arange(n)
        p = len(self.prefix)
        out = np.empty(n, dtype=float)
        head = min(n, p)
        out[:head] = self.prefix[:head]
        if n > p:
            j = idx[p:] - p
            if self.periodic:
                out[p:] = np.asarray(self.period)[j % len(self.period)]
            else:
                out[p:] = GENERATORS[self.generator](self.offset + j) ** self.power
        return out

    @property
    def scan_length(self) -> int | None:
        """Number of leading terms covering every distinct tail phase, or None for generators."""
        return len(self.prefix) + len(self.period) if self.periodic else None

    def shifted(self, k: int) -> WeightSequence:
        """The sequence w[k], w[k+1], ..."""
        p = len(self.prefix)
        if k <= p:
            return replace(self, prefix=self.prefix[k:])
        if self.periodic:
            j = (k - p) % len(self.period)
            return replace(self, prefix=(), period=self.period[j:] + self.period[:j])
        return replace(self, prefix=(), offset=self.offset + k - p)

    def with_prefix(self, head) -> WeightSequence:
        return replace(self, prefix=tuple(head) + self.prefix)

    def with_first(self, x: float) -> WeightSequence:
        return self.shifted(1).with_prefix((x,))

    def reciprocal(self) -> WeightSequence:
        return replace(
            self,
            prefix=tuple(1.0 / x for x in self.prefix),
            period=None if self.period is None else tuple(1.0 / x for x in self.period),
            power=-self.power,
        )

    def tail_log_mean(self) -> float:
        """Mean of log w over one period (periodic tails only)."""
        if not self.periodic:
            raise ValueError("no exact tail mean for generator sequences")
        return float(np.mean(np.log(self.period)))

    def tail_geometric_mean(self) -> float:
        """Geometric mean of one period; exact when the period is constant."""
        if self.periodic and len(set(self.period)) == 1:
            return float(self.period[0])
        return math.exp(self.tail_log_mean())

    def to_dict(self) -> dict:
        if self.periodic:
            return {"prefix": list(self.prefix), "period": list(self.period)}
        d = {"prefix": list(self.prefix), "generator": self.generator}
        if self.offset:
            d["offset"] = self.offset
        if self.power != 1:
            d["power"] = self.power
        return d

    @classmethod
    def from_dict(cls, d) -> WeightSequence:
        if isinstance(d, (int, float)):
            return cls.constant(float(d))
        if isinstance(d, list):
            return cls((), tuple(d))
        if not isinstance(d, dict):
            raise InvalidWeights(f"cannot read weight descriptor {d!r}")
        unknown = set(d) - {"prefix", "period", "generator", "offset", "power", "branching"}
        if unknown:
            raise InvalidWeights(f"unknown weight descriptor keys {sorted(unknown)}")
        if "generator" in d:
            return cls(tuple(d.get("prefix", ())), None, d["generator"], int(d.get("offset", 0)), int(d.get("power", 1)))
        if "period" not in d:
            raise InvalidWeights("weight descriptor needs 'period' or 'generator'")
        return cls(tuple(d.get("prefix", ())), tuple(d["period"]))
