"""The analytic model of a left-invertible tree shift.

``E = ker S*`` is the coefficient space.  A vector ``f`` is sent to the
E-valued power series ``U_f(z) = sum_n (P_E S'*^n f) z^n`` (``S'`` the Cauchy
dual), the shift becomes multiplication by ``z``, and the reproducing kernel is
``I + sum C_{j,k} z^j conj(w)^k`` with ``C_{j,k} = P_E S'*^j S'^k |_E``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InvalidParam, OutsideDisc
from .shift import (
    SparseVector,
    WeightedShift,
    apply,
    apply_adjoint,
    apply_adjoint_power,
    spectral_radius,
)
from .tree import VertexId

__all__ = [
    "CokernelBasis",
    "CoefficientBlock",
    "RadiusEstimate",
    "ModelCoefficients",
    "BasisPolynomial",
    "ReproducingResult",
    "KernelModel",
    "kernel_model",
    "cokernel_basis",
    "coefficient_block",
    "kernel_partial_sum",
    "radius_of_convergence",
    "model_coefficients",
    "basis_polynomial",
    "reproducing_check",
    "powers_orthogonal",
    "BAND_NAMES",
    "band_name",
]

ZERO_TOL = 1e-12

BAND_NAMES = {0: "diagonal", 1: "tridiagonal", 2: "pentadiagonal", 3: "septadiagonal"}


def band_name(offset: int) -> str:
    return BAND_NAMES.get(offset, f"{2 * offset + 1}-diagonal")


@dataclass(frozen=True)
class CokernelBasis:
    """Orthonormal basis of ker S*; ``tags[i]`` is ``("root",)`` or ``("branch", v, index)``."""

    vectors: tuple
    tags: tuple

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def __len__(self):
        return len(self.vectors)

    def __getitem__(self, i) -> SparseVector:
        return self.vectors[i]

    def coords(self, f: SparseVector) -> np.ndarray:
        """Coordinates of P_E f, i.e. <f, g_a> for each basis vector g_a."""
        return np.array([f.inner(g) for g in self.vectors], dtype=complex)

    def combine(self, c) -> SparseVector:
        out = SparseVector()
        for a, g in zip(c, self.vectors):
            if a != 0:
                out = out + a * g
        return out

    def support(self) -> set:
        return set().union(*(g.support() for g in self.vectors))


@dataclass(frozen=True)
class CoefficientBlock:
    j: int
    k: int
    matrix: np.ndarray

    def is_zero(self, tol: float = ZERO_TOL) -> bool:
        return bool(np.all(np.abs(self.matrix) <= tol))


@dataclass(frozen=True)
class RadiusEstimate:
    """a_n for n = 1..N with the usual liminf caveats.

    ``liminf_estimate`` is the minimum of a_n over the second half of the
    computed range; ``exact_limit`` is only set when every tail is periodic.
    """

    a: np.ndarray
    liminf_estimate: float
    exact_limit: float | None
    lower_bound: float

    @property
    def value(self) -> float:
        return self.exact_limit if self.exact_limit is not None else self.liminf_estimate


@dataclass(frozen=True)
class ModelCoefficients:
    f: SparseVector
    coeffs: np.ndarray  # shape (degree + 1, dim E)

    def __len__(self):
        return len(self.coeffs)

    def padded(self, n: int) -> np.ndarray:
        out = np.zeros((max(n, len(self.coeffs)), self.coeffs.shape[1]), dtype=complex)
        out[: len(self.coeffs)] = self.coeffs
        return out

    def __call__(self, z: complex) -> np.ndarray:
        """U_f(z) as E-coordinates."""
        powers = z ** np.arange(len(self.coeffs))
        return powers @ self.coeffs


@dataclass(frozen=True)
class BasisPolynomial:
    """U_{e_u}(z) with coefficient ``coeffs[k]`` (E-coordinates) on z^k."""

    vertex: VertexId
    coeffs: np.ndarray

    def nonzero_degrees(self, tol: float = ZERO_TOL) -> list[int]:
        return [k for k, c in enumerate(self.coeffs) if np.max(np.abs(c), initial=0.0) > tol]

    def __call__(self, z: complex) -> np.ndarray:
        return (z ** np.arange(len(self.coeffs))) @ self.coeffs


@dataclass(frozen=True)
class ReproducingResult:
    residual: float
    lhs: complex
    rhs: complex
    tail_bound: float


def cokernel_basis(S: WeightedShift) -> CokernelBasis:
    """e_root, then per branching vertex an orthonormal basis of l2(Chi v) minus lambda^v.

    Gram-Schmidt runs over child indicators in canonical order against
    lambda^v/|lambda^v|; each vector is signed so its first nonzero coordinate
    is positive.  With two children this gives (l2 e1 - l1 e2)/norm.
    """
    S.require_left_invertible()
    tree = S.tree
    vectors = [SparseVector.basis(tree.root)]
    tags = [("root",)]
    for v in tree.branching_vertices:
        chi = tree.children(v)
        lam = np.array([S.weight(c) for c in chi])
        Q = [lam / np.linalg.norm(lam)]
        new = []
        for i in range(len(chi)):
            x = np.zeros(len(chi))
            x[i] = 1.0
            for q in Q:
                x = x - (x @ q) * q
            # re-orthogonalize once for stability with many children
            for q in Q:
                x = x - (x @ q) * q
            n = np.linalg.norm(x)
            if n <= 1e-10:
                continue
            x = x / n
            lead = x[np.flatnonzero(np.abs(x) > 1e-14)[0]]
            if lead < 0:
                x = -x
            Q.append(x)
            new.append(x)
        for i, x in enumerate(new):
            vectors.append(SparseVector({c: xc for c, xc in zip(chi, x) if xc != 0}))
            tags.append(("branch", v, i))
    for g in vectors:
        r = apply_adjoint(S, g).norm()
        if r > 1e-10:
            raise AssertionError(f"cokernel vector not annihilated by S* (residual {r:.3g})")
    return CokernelBasis(tuple(vectors), tuple(tags))


class KernelModel:
    """Per-shift cache of the cokernel basis and the dual powers S'^k g."""

    def __init__(self, S: WeightedShift):
        self.S = S
        self.dual = S.dual
        self.basis = cokernel_basis(S)
        self._powers = [list(self.basis.vectors)]

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def k_T(self) -> int:
        return self.S.tree.branching_index

    def dual_powers(self, k: int) -> list[SparseVector]:
        """[S'^k g for g in basis]."""
        while len(self._powers) <= k:
            self._powers.append([apply(self.dual, g) for g in self._powers[-1]])
        return self._powers[k]

    def block(self, j: int, k: int) -> CoefficientBlock:
        if j < 0 or k < 0:
            raise InvalidParam("block indices must be non-negative")
        Pj, Pk = self.dual_powers(j), self.dual_powers(k)
        M = np.array([[Pk[b].inner(Pj[a]) for b in range(self.dim)] for a in range(self.dim)])
        return CoefficientBlock(j, k, M)

    def blocks(self, N: int) -> dict:
        """All C_{j,k} with 0 <= j, k <= N."""
        return {(j, k): self.block(j, k) for j in range(N + 1) for k in range(N + 1)}

    def band_offsets(self, N: int, tol: float = ZERO_TOL) -> list[int]:
        """Sorted offsets j-k realized by a nonzero block with 1 <= j, k <= N."""
        offs = {j - k for (j, k), B in self.blocks(N).items() if j and k and not B.is_zero(tol)}
        return sorted(offs)


def kernel_model(S: WeightedShift) -> KernelModel:
    """The cached :class:`KernelModel` of ``S`` (stored on the instance)."""
    m = S.__dict__.get("_kernel_model")
    if m is None:
        m = S.__dict__["_kernel_model"] = KernelModel(S)
    return m


def coefficient_block(S: WeightedShift, j: int, k: int) -> CoefficientBlock:
    """C_{j,k}(a, b) = <S'^k g_b, S'^j g_a> in the cokernel basis."""
    return kernel_model(S).block(j, k)


def radius_of_convergence(S: WeightedShift, N: int) -> RadiusEstimate:
    """a_n = (sum over v in W_n of squared dual path products of length n)^(-1/(2n))."""
    if N < 1:
        raise InvalidParam("N must be >= 1")
    dual = S.dual
    kT = S.tree.branching_index
    L, member, _ = dual.lineage_table(N + kT)
    logs = _kernels.radius_logsums(L, member, kT, N)
    n = np.arange(1, N + 1)
    a = np.exp(-logs / (2 * n))
    liminf = float(a[(N - 1) // 2 :].min())
    exact = None
    if S.periodic:
        exact = min(s.tail_geometric_mean() for s in S.ray_weights.values())
    lower = 1.0 / spectral_radius(dual, N).value
    return RadiusEstimate(a, liminf, exact, lower)


def kernel_partial_sum(S: WeightedShift, z: complex, w: complex, N: int, radius: float | None = None) -> np.ndarray:
    """I_E + sum over 1 <= j, k <= N, |j-k| <= k_T of C_{j,k} z^j conj(w)^k.

    Warns with :class:`OutsideDisc` when |z| or |w| reaches the radius
    estimate (computed with order ``N`` unless ``radius`` is given).
    """
    if N < 1:
        raise InvalidParam("N must be >= 1")
    if radius is None:
        radius = radius_of_convergence(S, N).value
    if max(abs(z), abs(w)) >= radius:
        warnings.warn(OutsideDisc(f"|z|, |w| must be below the radius estimate {radius:.6g}"), stacklevel=2)
    model = kernel_model(S)
    kT = model.k_T
    K = np.eye(model.dim, dtype=complex)
    wc = np.conj(w)
    for j in range(1, N + 1):
        for k in range(max(1, j - kT), min(N, j + kT) + 1):
            K += model.block(j, k).matrix * (z**j) * (wc**k)
    return K


def _max_generation(S: WeightedShift, f: SparseVector) -> int:
    return max((S.tree.generation_of(v) for v, _ in f), default=-1)


def model_coefficients(S: WeightedShift, f: SparseVector) -> ModelCoefficients:
    """Coefficient n is the E-coordinate vector of P_E S'*^n f; exact and finite."""
    model = kernel_model(S)
    top = _max_generation(S, f)
    coeffs = np.zeros((top + 1, model.dim), dtype=complex)
    for v, c in f:
        for n in range(S.tree.generation_of(v) + 1):
            h = apply_adjoint_power(model.dual, v, n)
            coeffs[n] += c * model.basis.coords(h)
    return ModelCoefficients(f, coeffs)


def basis_polynomial(S: WeightedShift, u: VertexId) -> BasisPolynomial:
    return BasisPolynomial(u, model_coefficients(S, SparseVector.basis(u)).coeffs)


def reproducing_check(S: WeightedShift, f: SparseVector, g_index: int, w: complex, N: int = 60, radius: float | None = None) -> ReproducingResult:
    """Compare <U_f(w), g>_E with <f, sum_{k<=N} conj(w)^k S'^k g>.

    The second expression is f paired with the preimage of kappa(., w) g.
    Raises :class:`OutsideDisc` when |w| reaches the radius estimate.
    """
    model = kernel_model(S)
    if not 0 <= g_index < model.dim:
        raise InvalidParam(f"g_index {g_index} out of range for dim E = {model.dim}")
    if radius is None:
        radius = radius_of_convergence(S, max(N, 8)).value
    if abs(w) >= radius:
        raise OutsideDisc(f"|w| = {abs(w):.6g} is not below the radius estimate {radius:.6g}")
    lhs = complex(model_coefficients(S, f)(w)[g_index])
    rhs = 0j
    for k in range(N + 1):
        rhs += w**k * f.inner(model.dual_powers(k)[g_index])
    rhs = complex(rhs)
    norm_dual = model.dual.norm
    q = abs(w) * norm_dual
    tail = q ** (N + 1) / (1 - q) * f.norm() if q < 1 else math.inf
    return ReproducingResult(abs(lhs - rhs), lhs, rhs, tail)


def powers_orthogonal(S: WeightedShift, kmax: int = 8, tol: float = ZERO_TOL) -> bool:
    """True when the subspaces S^k E (0 <= k <= kmax) are pairwise orthogonal."""
    basis = kernel_model(S).basis
    powers = [list(basis.vectors)]
    for _ in range(kmax):
        powers.append([apply(S, g) for g in powers[-1]])
    for i in range(kmax + 1):
        for j in range(i + 1, kmax + 1):
            for a in powers[i]:
                for b in powers[j]:
                    if abs(a.inner(b)) > tol * max(1.0, a.norm() * b.norm()):
                        return False
    return True
