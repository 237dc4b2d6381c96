"""Weighted shifts S on directed trees: (S f)(v) = lambda_v f(par v).

Vectors are finitely supported (:class:`SparseVector`); every operation here is
a finite sum of path products, so nothing is iterative or truncated except the
spectral-radius sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from . import _kernels
from .errors import InvalidWeights, NotLeftInvertible
from .tree import Core, DirectedTree, Ray, VertexId
from .weights import WeightSequence

__all__ = [
    "SparseVector",
    "WeightedShift",
    "SpectralRadius",
    "apply",
    "apply_adjoint",
    "apply_power",
    "apply_adjoint_power",
    "column_norm",
    "cauchy_dual",
    "spectral_radius",
    "GENERATOR_HORIZON",
    "random_vector",
]

# how far generator-driven rays are scanned for sup/inf statistics
GENERATOR_HORIZON = 1 << 15


class SparseVector:
    """Finitely supported complex function on the vertex set."""

    __slots__ = ("entries",)
    # let numpy scalars defer to __rmul__ instead of iterating over entries
    __array_ufunc__ = None

    def __init__(self, entries: Mapping | Iterable = ()):
        self.entries: dict = {}
        items = entries.items() if isinstance(entries, Mapping) else entries
        for v, c in items:
            if c != 0:
                self.entries[v] = self.entries.get(v, 0) + complex(c)

    @classmethod
    def basis(cls, v) -> SparseVector:
        return cls({v: 1.0})

    def __getitem__(self, v) -> complex:
        return self.entries.get(v, 0j)

    def __iter__(self):
        return iter(self.entries.items())

    def __len__(self):
        return len(self.entries)

    def __bool__(self):
        return bool(self.entries)

    def support(self) -> set:
        return set(self.entries)

    def __add__(self, other: SparseVector) -> SparseVector:
        out = dict(self.entries)
        for v, c in other.entries.items():
            out[v] = out.get(v, 0) + c
        return SparseVector(out)

    def __sub__(self, other: SparseVector) -> SparseVector:
        return self + (-1) * other

    def __mul__(self, a) -> SparseVector:
        return SparseVector({v: a * c for v, c in self.entries.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return -1 * self

    def inner(self, other: SparseVector) -> complex:
        """<self, other> = sum self(v) conj(other(v))."""
        a, b = (self.entries, other.entries)
        if len(b) < len(a):
            return sum(a[v] * c.conjugate() for v, c in b.items() if v in a)
        return sum(c * b[v].conjugate() for v, c in a.items() if v in b)

    def norm(self) -> float:
        return math.sqrt(sum(abs(c) ** 2 for c in self.entries.values()))

    def dense(self, index: Mapping) -> np.ndarray:
        """Coordinates along an ordered vertex index (vertex -> position)."""
        out = np.zeros(len(index), dtype=complex)
        for v, c in self.entries.items():
            out[index[v]] = c
        return out

    def __repr__(self):
        body = ", ".join(f"{v}: {c:.6g}" for v, c in self.entries.items())
        return f"SparseVector({{{body}}})"


@dataclass(frozen=True)
class SpectralRadius:
    """b_n = (sup_u ||S^n e_u||)^(1/n) for n = 1..N, plus the exact limit when known."""

    sequence: np.ndarray
    exact_limit: float | None

    @property
    def value(self) -> float:
        return self.exact_limit if self.exact_limit is not None else float(self.sequence[-1])


class WeightedShift:
    """Tree plus strictly positive weights on every non-root vertex.

    ``core_weights`` maps core vertex names to weights; ``ray_weights`` maps
    ray ids to :class:`WeightSequence` (entry ``d`` is the weight of
    ``Ray(r, d)``).
    """

    def __init__(self, tree: DirectedTree, core_weights: Mapping, ray_weights: Mapping):
        self.tree = tree
        core_weights = {str(k): float(v) for k, v in core_weights.items()}
        ray_weights = {
            str(k): v if isinstance(v, WeightSequence) else WeightSequence.from_dict(v)
            for k, v in ray_weights.items()
        }
        needed = {u.name for u in tree.core_vertices if u != tree.root}
        missing = needed - set(core_weights)
        if missing:
            raise InvalidWeights(f"missing core weights for {sorted(missing)}")
        extra = set(core_weights) - needed
        if extra:
            raise InvalidWeights(f"core weights given for unknown or root vertices {sorted(extra)}")
        missing = set(tree.ray_ids) - set(ray_weights)
        if missing:
            raise InvalidWeights(f"missing ray weights for {sorted(missing)}")
        extra = set(ray_weights) - set(tree.ray_ids)
        if extra:
            raise InvalidWeights(f"weights given for unknown rays {sorted(extra)}")
        for k, w in core_weights.items():
            if not math.isfinite(w) or w < 0:
                raise InvalidWeights(f"weight of {k!r} must be finite and non-negative, got {w}")
        self.core_weights = core_weights
        self.ray_weights = ray_weights
        self._check_positive()

    def _check_positive(self):
        lo, _ = self.column_norm_bounds()
        if lo == 0:
            raise NotLeftInvertible("some column norm ||S e_u|| is zero")
        zeros = [k for k, w in self.core_weights.items() if w == 0]
        zeros += [r for r, s in self.ray_weights.items() if s.periodic and 0 in s.prefix + s.period]
        if zeros:
            raise InvalidWeights(f"zero weights are not supported (at {sorted(zeros)})")

    # -- constructors -------------------------------------------------------

    @classmethod
    def isometric(cls, tree: DirectedTree) -> WeightedShift:
        """Weights 1/sqrt(card Chi(par v)), so every column has norm 1."""
        cw = {}
        for u in tree.core_vertices:
            for c in tree.children(u):
                if isinstance(c, Core):
                    cw[c.name] = 1.0 / math.sqrt(tree.out_degree(u))
        rw = {
            r: WeightSequence((1.0 / math.sqrt(tree.out_degree(tree.ray_attach(r))),), (1.0,))
            for r in tree.ray_ids
        }
        return cls(tree, cw, rw)

    @classmethod
    def default(cls, tree: DirectedTree) -> WeightedShift:
        """Deterministic generic weights: no accidental symmetries between rays."""
        cw = {u.name: 1.0 + 0.1 * (i + 1) for i, u in enumerate(tree.core_vertices[1:])}
        rw = {}
        for i, r in enumerate(tree.ray_ids):
            rw[r] = WeightSequence(
                (1.0 + 0.3 * (i + 1), 1.0 / (1.0 + 0.2 * (i + 1))), (1.0 + 0.1 * i,)
            )
        return cls(tree, cw, rw)

    @classmethod
    def random(cls, tree: DirectedTree, rng: np.random.Generator, low: float = 0.3, high: float = 2.0) -> WeightedShift:
        """Random positive weights with random prefixes and periods (lengths 0..3 and 1..3)."""
        cw = {u.name: float(rng.uniform(low, high)) for u in tree.core_vertices[1:]}
        rw = {}
        for r in tree.ray_ids:
            prefix = rng.uniform(low, high, int(rng.integers(0, 4)))
            period = rng.uniform(low, high, int(rng.integers(1, 4)))
            rw[r] = WeightSequence(tuple(prefix), tuple(period))
        return cls(tree, cw, rw)

    def normalized(self) -> WeightedShift:
        """Rescale every column to norm one (an isometry with the same tree)."""
        cw = {}
        for name, w in self.core_weights.items():
            cw[name] = w / self.column_norm(self.tree.parent(Core(name)))
        rw = {}
        for r, seq in self.ray_weights.items():
            c = self.column_norm(self.tree.ray_attach(r))
            rw[r] = WeightSequence((seq[0] / c,), (1.0,))
        return WeightedShift(self.tree, cw, rw)

    def with_weights(self, core_weights=None, ray_weights=None) -> WeightedShift:
        cw = dict(self.core_weights)
        cw.update(core_weights or {})
        rw = dict(self.ray_weights)
        rw.update(ray_weights or {})
        return WeightedShift(self.tree, cw, rw)

    # -- weights and columns --------------------------------------------------

    @property
    def periodic(self) -> bool:
        return all(s.periodic for s in self.ray_weights.values())

    def weight(self, v: VertexId) -> float:
        if isinstance(v, Ray):
            return self.ray_weights[v.ray][v.depth]
        if v == self.tree.root:
            raise InvalidWeights("the root carries no weight")
        return self.core_weights[v.name]

    def column_norm(self, u: VertexId) -> float:
        """||S e_u|| = sqrt(sum of lambda_v^2 over children v of u)."""
        if isinstance(u, Ray):
            return self.ray_weights[u.ray][u.depth + 1]
        return math.sqrt(sum(self.weight(c) ** 2 for c in self.tree.children(u)))

    def column_norm_bounds(self) -> tuple[float, float]:
        """(inf_u, sup_u) of ||S e_u||, by a finite scan of core + one period per ray."""
        vals = [self.column_norm(u) for u in self.tree.core_vertices]
        for seq in self.ray_weights.values():
            n = seq.scan_length or GENERATOR_HORIZON
            tail = seq.values(n + 1)[1:]
            vals += [float(tail.min()), float(tail.max())]
        return min(vals), max(vals)

    @cached_property
    def norm(self) -> float:
        """||S|| = sup_u ||S e_u|| (the images S e_u are mutually orthogonal)."""
        return self.column_norm_bounds()[1]

    def require_left_invertible(self):
        if self.column_norm_bounds()[0] <= 0:
            raise NotLeftInvertible("inf_u ||S e_u|| = 0")

    def to_dict(self) -> dict:
        return {
            "core_weights": dict(sorted(self.core_weights.items())),
            "ray_weights": {r: self.ray_weights[r].to_dict() for r in self.tree.ray_ids},
        }

    @cached_property
    def dual(self) -> WeightedShift:
        return cauchy_dual(self)

    def lineage_table(self, H: int):
        """Cumulative log-weights along every root-to-ray path, generations 0..H.

        Returns ``(L, member, rows)``: ``L[l, g]`` is the log of the product of
        weights from the root down to the generation-``g`` vertex of lineage
        ``l``; ``member[l, g]`` marks the single lineage that owns each vertex,
        so sums over ``member`` count every vertex once; ``rows`` maps ray id
        to lineage index.
        """
        tree = self.tree
        rids = tree.ray_ids
        L = np.zeros((len(rids), H + 1))
        member = np.zeros((len(rids), H + 1), dtype=bool)
        owned = set()
        for i, r in enumerate(rids):
            path = []
            a: VertexId | None = tree.ray_attach(r)
            while a is not None:
                path.append(a)
                a = tree.parent(a)
            path.reverse()
            s = len(path)
            logs = np.zeros(H + 1)
            for g, u in enumerate(path[1 : H + 1], start=1):
                logs[g] = math.log(self.weight(u))
                if u not in owned:
                    owned.add(u)
                    member[i, g] = True
            if 0 < s and tree.root not in owned:
                owned.add(tree.root)
                member[i, 0] = True
            if H >= s:
                logs[s:] = np.log(self.ray_weights[r].values(H - s + 1))
                member[i, s:] = True
            L[i] = np.cumsum(logs)
        return L, member, {r: i for i, r in enumerate(rids)}

    def __repr__(self):
        return f"WeightedShift({self.tree!r})"


def apply(S: WeightedShift, f: SparseVector) -> SparseVector:
    out: dict = {}
    for v, c in f:
        for w in S.tree.children(v):
            out[w] = out.get(w, 0) + S.weight(w) * c
    return SparseVector(out)


def apply_adjoint(S: WeightedShift, f: SparseVector) -> SparseVector:
    out: dict = {}
    for v, c in f:
        p = S.tree.parent(v)
        if p is not None:
            out[p] = out.get(p, 0) + S.weight(v) * c
    return SparseVector(out)


def apply_power(S: WeightedShift, u: VertexId, k: int) -> SparseVector:
    """S^k e_u = sum over v in Chi^k(u) of the path product lambda_v ... lambda_{par^{k-1} v}."""
    if k < 0:
        raise ValueError("k must be non-negative")
    f = SparseVector.basis(u)
    for _ in range(k):
        f = apply(S, f)
    return f


def apply_adjoint_power(S: WeightedShift, u: VertexId, k: int) -> SparseVector:
    if k < 0:
        raise ValueError("k must be non-negative")
    coef = 1.0
    v: VertexId | None = u
    for _ in range(k):
        p = S.tree.parent(v)
        if p is None:
            return SparseVector()
        coef *= S.weight(v)
        v = p
    return SparseVector({v: coef})


def column_norm(S: WeightedShift, u: VertexId) -> float:
    return S.column_norm(u)


def cauchy_dual(S: WeightedShift) -> WeightedShift:
    """Weighted shift with weights lambda'_v = lambda_v / ||S e_par(v)||^2."""
    S.require_left_invertible()
    tree = S.tree
    cw = {
        name: w / S.column_norm(tree.parent(Core(name))) ** 2
        for name, w in S.core_weights.items()
    }
    rw = {}
    for r, seq in S.ray_weights.items():
        first = seq[0] / S.column_norm(tree.ray_attach(r)) ** 2
        rw[r] = seq.reciprocal().with_first(first)
    return WeightedShift(tree, cw, rw)


def _logsumexp_masked(terms, mask, axis=0):
    terms = np.where(mask, terms, -np.inf)
    top = terms.max(axis=axis)
    return top + np.log(np.exp(terms - np.expand_dims(top, axis)).sum(axis=axis))


def spectral_radius(S: WeightedShift, N: int, horizon: int = GENERATOR_HORIZON) -> SpectralRadius:
    """Sequence b_n = (sup_u ||S^n e_u||)^(1/n), n = 1..N.

    ``sup_u`` runs over core vertices and, per ray, over every starting phase
    (prefix plus one period, or ``horizon`` terms for generator rays).  With
    all tails periodic the limit is the largest per-ray geometric mean of the
    period, reported as ``exact_limit``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    tree = S.tree
    best = np.full(N, -np.inf)

    H = tree.core_depth + N + 1
    L, member, rows = S.lineage_table(H)
    for u in tree.core_vertices:
        g = tree.generation_of(u)
        idx = [rows[r] for r in tree.rays_below(u)]
        Lu = L[idx[0], g]
        cols = np.arange(g + 1, g + N + 1)
        half = 0.5 * _logsumexp_masked(2.0 * L[np.ix_(idx, cols)], member[np.ix_(idx, cols)])
        best = np.maximum(best, half - Lu)

    for seq in S.ray_weights.values():
        M = seq.scan_length or horizon
        x = np.log(seq.values(M + N + 1))
        P = np.concatenate(([0.0], np.cumsum(x)))
        # u = Ray(r, m) sees weights at depths m+1 .. m+n, i.e. P[m+1+n] - P[m+1]
        vmax, _ = _kernels.window_extrema(P, 1, M + 1, N)
        best = np.maximum(best, vmax)

    n = np.arange(1, N + 1)
    seq_b = np.exp(best / n)
    exact = None
    if S.periodic:
        exact = max(s.tail_geometric_mean() for s in S.ray_weights.values())
    return SpectralRadius(seq_b, exact)


def random_vector(tree: DirectedTree, rng: np.random.Generator, depth: int = 6, nnz: int = 5, complex_values: bool = True) -> SparseVector:
    """Random sparse vector supported in generations <= depth (for property checks)."""
    pool = tree.vertices_upto(depth)
    idx = rng.choice(len(pool), size=min(nnz, len(pool)), replace=False)
    vals = rng.standard_normal(len(idx))
    if complex_values:
        vals = vals + 1j * rng.standard_normal(len(idx))
    return SparseVector({pool[i]: c for i, c in zip(sorted(idx), vals)})
