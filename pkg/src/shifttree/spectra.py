"""Spectral picture of a left-invertible tree shift with finite branching index.

Past generation k_T the tree is a disjoint union of dim E chains, so S is a
finite-rank perturbation of a direct sum of unilateral weighted shifts.
Essential spectrum, annuli and Fredholm index all come from those chains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InvalidParam, OnEssentialSpectrum, OutsideDelta
from .model import kernel_model, radius_of_convergence
from .shift import GENERATOR_HORIZON, SparseVector, WeightedShift, apply, apply_adjoint, spectral_radius
from .tree import Core, DirectedTree, Ray, VertexId
from .weights import WeightSequence

__all__ = [
    "Annulus",
    "AnnulusSet",
    "UnilateralDecomposition",
    "CowenDouglasField",
    "ChiKerReport",
    "SpectralReport",
    "dim_ker_adjoint_power",
    "dim_ker_adjoint_power_numeric",
    "quotient_dims",
    "chi_ker_check",
    "unilateral_decomposition",
    "ap_spectrum_annuli",
    "annulus_of",
    "fredholm_index",
    "index_samples",
    "cowen_douglas_field",
    "point_spectrum_check",
    "density_rank",
    "spectral_report",
    "truncated_matrix",
]


def _tree(x) -> DirectedTree:
    return x.tree if isinstance(x, WeightedShift) else x


def dim_ker_adjoint_power(S, k: int) -> int:
    """dim ker S*^k, counted on the tree alone."""
    if k < 1:
        raise InvalidParam("k must be >= 1")
    t = _tree(S)
    head = sum(len(t.generation(i)) for i in range(k))
    return head + sum(t.count_descendants(v, k) - 1 for v in t.window(-1))


def truncated_matrix(S: WeightedShift, cols: list, rows: list, op) -> np.ndarray:
    """Dense matrix of ``op`` (a SparseVector -> SparseVector map) from span(cols) into span(rows)."""
    index = {v: i for i, v in enumerate(rows)}
    M = np.zeros((len(rows), len(cols)), dtype=complex)
    for j, v in enumerate(cols):
        for u, c in op(SparseVector.basis(v)):
            if u not in index:
                raise ValueError(f"image vertex {u} outside the row set")
            M[index[u], j] = c
    return M


def dim_ker_adjoint_power_numeric(S: WeightedShift, k: int, tol: float = 1e-9) -> int:
    """Nullity of S*^k restricted to generations <= k + k_T, from singular values."""
    t = S.tree
    cols = t.vertices_upto(k + t.branching_index)
    rows = t.vertices_upto(t.branching_index)

    def op(f):
        for _ in range(k):
            f = apply_adjoint(S, f)
        return f

    M = truncated_matrix(S, cols, rows, op)
    sv = np.linalg.svd(M, compute_uv=False)
    return len(cols) - int(np.sum(sv > tol))


def quotient_dims(S, kmax: int) -> list[int]:
    """dim ker S*^k - dim ker S*^(k-1) for k = 1..kmax."""
    dims = [0] + [dim_ker_adjoint_power(S, k) for k in range(1, kmax + 1)]
    return [b - a for a, b in zip(dims, dims[1:])]


@dataclass(frozen=True)
class ChiKerReport:
    ok: bool
    dim_E: int
    cards: dict
    branch_count: int

    def to_dict(self):
        return {"ok": self.ok, "dim_E": self.dim_E, "cards": {str(k): v for k, v in self.cards.items()}, "branch_count": self.branch_count}


def chi_ker_check(t, extra: int = 10) -> ChiKerReport:
    """card Chi^k(root) = dim E for k_T <= k <= k_T + extra, and at k_T the branch-count formula holds."""
    t = _tree(t)
    kT = t.branching_index
    dim_E = dim_ker_adjoint_power(t, 1)
    cards = {k: len(t.generation(k)) for k in range(kT, kT + extra + 1)}
    bv = t.branching_vertices
    formula = 1 - len(bv) + sum(t.out_degree(v) for v in bv)
    ok = all(c == dim_E for c in cards.values()) and cards[kT] == formula
    return ChiKerReport(ok, dim_E, cards, formula)


@dataclass
class UnilateralDecomposition:
    """S = A on span(M) + connections into branch heads + unilateral shifts S_i.

    ``M`` lists the vertices of generations < k_T; branch ``i`` starts at the
    i-th vertex of generation k_T and follows its unique descendant chain.
    ``branch_weights[i][m]`` is the weight moving position m to m + 1.
    """

    M: list
    A: dict  # u in M -> [(v in M, weight)]
    entry: dict  # u in M -> [(branch index, weight)]
    heads: list  # per branch: the core part of the chain
    rays: list  # per branch: the ray id the chain ends in
    depths: list  # per branch: depth on that ray where the chain enters it
    branch_weights: list

    @property
    def M_dim(self) -> int:
        return len(self.M)

    @property
    def d(self) -> int:
        return len(self.heads)

    def vertex(self, i: int, m: int) -> VertexId:
        head = self.heads[i]
        if m < len(head):
            return head[m]
        return Ray(self.rays[i], self.depths[i] + m - len(head))

    def position(self, v: VertexId) -> tuple[int, int]:
        for i, head in enumerate(self.heads):
            if v in head:
                return i, head.index(v)
            if isinstance(v, Ray) and v.ray == self.rays[i] and v.depth >= self.depths[i]:
                return i, len(head) + v.depth - self.depths[i]
        raise KeyError(v)

    def apply(self, f: SparseVector) -> SparseVector:
        """Block action, with no reference to the tree."""
        out: dict = {}
        Mset = set(self.M)
        for v, c in f:
            if v in Mset:
                for u, w in self.A.get(v, ()):
                    out[u] = out.get(u, 0) + w * c
                for i, w in self.entry.get(v, ()):
                    u = self.vertex(i, 0)
                    out[u] = out.get(u, 0) + w * c
            else:
                i, m = self.position(v)
                u = self.vertex(i, m + 1)
                out[u] = out.get(u, 0) + self.branch_weights[i][m] * c
        return SparseVector(out)


def unilateral_decomposition(S: WeightedShift) -> UnilateralDecomposition:
    t = S.tree
    kT = t.branching_index
    M = t.vertices_upto(kT - 1)
    starts = t.generation(kT)
    A, entry = {}, {}
    for u in M:
        for c in t.children(u):
            if t.generation_of(c) < kT:
                A.setdefault(u, []).append((c, S.weight(c)))
            else:
                entry.setdefault(u, []).append((starts.index(c), S.weight(c)))
    heads, rays, depths, weights = [], [], [], []
    for b in starts:
        head = []
        v = b
        while isinstance(v, Core):
            head.append(v)
            (v,) = t.children(v)
        seq = S.ray_weights[v.ray].shifted(v.depth + 1)
        if head:
            seq = seq.with_prefix([S.weight(x) for x in head[1:]] + [S.weight(v)])
        heads.append(head)
        rays.append(v.ray)
        depths.append(v.depth)
        weights.append(seq)
    return UnilateralDecomposition(M, A, entry, heads, rays, depths, weights)


@dataclass(frozen=True)
class Annulus:
    inner: float
    outer: float
    branch: int
    exact: bool
    inner_seq: np.ndarray | None = field(default=None, repr=False, compare=False)
    outer_seq: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def is_circle(self) -> bool:
        return math.isclose(self.inner, self.outer, rel_tol=1e-12)

    def contains(self, r: float, tol: float = 0.0) -> bool:
        return self.inner - tol <= r <= self.outer + tol

    def to_dict(self):
        return {"branch": self.branch, "inner": self.inner, "outer": self.outer, "exact": self.exact}


@dataclass(frozen=True)
class AnnulusSet:
    annuli: tuple

    @property
    def components(self) -> list[tuple[float, float]]:
        """Union of the annuli as disjoint radial intervals."""
        out: list[list[float]] = []
        for a in sorted(self.annuli, key=lambda a: (a.inner, a.outer)):
            if out and a.inner <= out[-1][1] * (1 + 1e-12):
                out[-1][1] = max(out[-1][1], a.outer)
            else:
                out.append([a.inner, a.outer])
        return [tuple(c) for c in out]

    def __iter__(self):
        return iter(self.annuli)

    def __len__(self):
        return len(self.annuli)

    def to_dict(self):
        return {"annuli": [a.to_dict() for a in self.annuli], "components": [list(c) for c in self.components]}


def annulus_of(seq: WeightSequence, N: int, branch: int = 0, horizon: int = GENERATOR_HORIZON) -> Annulus:
    """Radii of the approximate point spectrum of the unilateral shift with weights ``seq``.

    outer = lim (sup_m w_m...w_{m+n-1})^(1/n), inner = the same with inf.
    Periodic tails give a circle at the geometric mean of the period.
    """
    M = seq.scan_length or horizon
    P = np.concatenate(([0.0], np.cumsum(np.log(seq.values(M + N)))))
    vmax, vmin = _kernels.window_extrema(P, 0, M, N)
    n = np.arange(1, N + 1)
    outer_seq, inner_seq = np.exp(vmax / n), np.exp(vmin / n)
    if seq.periodic:
        g = seq.tail_geometric_mean()
        return Annulus(g, g, branch, True, inner_seq, outer_seq)
    return Annulus(float(inner_seq[-1]), float(outer_seq[-1]), branch, False, inner_seq, outer_seq)


def ap_spectrum_annuli(S: WeightedShift, N: int = 256) -> AnnulusSet:
    dec = unilateral_decomposition(S)
    return AnnulusSet(tuple(annulus_of(w, N, i) for i, w in enumerate(dec.branch_weights)))


def fredholm_index(S: WeightedShift, w: complex, annuli: AnnulusSet | None = None, tol: float = 1e-9) -> int:
    """ind(S - w) = -(number of branches whose annulus hole contains w)."""
    if annuli is None:
        annuli = ap_spectrum_annuli(S)
    r = abs(w)
    for a in annuli:
        if a.contains(r, tol):
            raise OnEssentialSpectrum(f"|w| = {r:.12g} lies on the annulus [{a.inner:.12g}, {a.outer:.12g}] of branch {a.branch}")
    return -sum(1 for a in annuli if r < a.inner)


def index_samples(S: WeightedShift, annuli: AnnulusSet | None = None) -> list[tuple[float, int]]:
    """Index at |w| = 0, at the midpoint of every gap between components, and past the outermost radius."""
    if annuli is None:
        annuli = ap_spectrum_annuli(S)
    comps = annuli.components
    radii = [0.0] + [(a[1] + b[0]) / 2 for a, b in zip(comps, comps[1:])] + [comps[-1][1] + 1.0]
    return [(r, fredholm_index(S, r, annuli)) for r in radii]


@dataclass(frozen=True)
class CowenDouglasField:
    w: complex
    vectors: tuple
    residual: float
    tail_bound: float
    gram_det: float
    delta: float

    @property
    def dim(self) -> int:
        return len(self.vectors)


def cowen_douglas_field(S: WeightedShift, w: complex, N: int = 80) -> CowenDouglasField:
    """Eigenvectors v_g = sum_{k<=N} conj(w)^k S'^k g of S* for g in the cokernel basis."""
    model = kernel_model(S)
    norm_dual = model.dual.norm
    delta = 1.0 / norm_dual
    if abs(w) >= delta:
        raise OutsideDelta(f"|w| = {abs(w):.6g} must be below delta = {delta:.6g}")
    wc = np.conj(w)
    vecs = []
    for a in range(model.dim):
        v = SparseVector()
        for k in range(N + 1):
            v = v + wc**k * model.dual_powers(k)[a]
        vecs.append(v)
    residual = max((apply_adjoint(S, v) - wc * v).norm() for v in vecs)
    tail = abs(w) ** (N + 1) * norm_dual**N
    units = [v * (1 / v.norm()) for v in vecs]
    G = np.array([[b.inner(a) for b in units] for a in units])
    gram_det = float(abs(np.linalg.det(G)))
    return CowenDouglasField(complex(w), tuple(vecs), residual, tail, gram_det, delta)


def point_spectrum_check(S: WeightedShift, w: complex, G: int = 12) -> tuple[float, float]:
    """(smallest singular value of S - w on generations <= G, the lower bound delta - |w|)."""
    t = S.tree
    cols = t.vertices_upto(G)
    rows = t.vertices_upto(G + 1)
    M = truncated_matrix(S, cols, rows, lambda f: apply(S, f) - w * f)
    smin = float(np.linalg.svd(M, compute_uv=False).min())
    delta = 1.0 / S.dual.norm
    return smin, delta - abs(w)


def density_rank(S: WeightedShift, G: int, eps: float, points: int = 20, N: int = 80) -> tuple[int, int]:
    """(rank of the truncated eigenvector span over a grid in |w| < eps, dim of the truncation window)."""
    t = S.tree
    rows = t.vertices_upto(G)
    rng = np.random.default_rng(0)
    radii = eps * np.sqrt(rng.uniform(0.2, 0.95, points))
    angles = rng.uniform(0, 2 * np.pi, points)
    cols = []
    for w in radii * np.exp(1j * angles):
        for v in cowen_douglas_field(S, w, N).vectors:
            cols.append([v[u] for u in rows])
    A = np.array(cols).T
    sv = np.linalg.svd(A, compute_uv=False)
    rank = int(np.sum(sv > 1e-10 * sv[0]))
    return rank, len(rows)


@dataclass(frozen=True)
class SpectralReport:
    r_S: float
    r_S_exact: bool
    r_dual: float
    r_dual_exact: bool
    r_lambda: float
    r_lambda_exact: bool
    delta: float
    dim_E: int
    annuli: AnnulusSet
    index: list
    kernel_dims: dict
    quotient_dims: list
    chi_ker: ChiKerReport

    def to_dict(self):
        return {
            "spectral_radius": {"value": self.r_S, "exact": self.r_S_exact},
            "dual_spectral_radius": {"value": self.r_dual, "exact": self.r_dual_exact},
            "radius_of_convergence": {"value": self.r_lambda, "exact": self.r_lambda_exact},
            "delta": self.delta,
            "dim_E": self.dim_E,
            "ap_spectrum": self.annuli.to_dict(),
            "index_samples": [{"abs_w": r, "index": i} for r, i in self.index],
            "kernel_dims": {str(k): v for k, v in self.kernel_dims.items()},
            "quotient_dims": self.quotient_dims,
            "chi_ker": self.chi_ker.to_dict(),
        }


def spectral_report(S: WeightedShift, N: int = 256, kmax: int = 6) -> SpectralReport:
    rS = spectral_radius(S, N)
    rD = spectral_radius(S.dual, N)
    rl = radius_of_convergence(S, N)
    annuli = ap_spectrum_annuli(S, N)
    return SpectralReport(
        r_S=rS.value,
        r_S_exact=rS.exact_limit is not None,
        r_dual=rD.value,
        r_dual_exact=rD.exact_limit is not None,
        r_lambda=rl.value,
        r_lambda_exact=rl.exact_limit is not None,
        delta=1.0 / S.dual.norm,
        dim_E=dim_ker_adjoint_power(S, 1),
        annuli=annuli,
        index=index_samples(S, annuli),
        kernel_dims={k: dim_ker_adjoint_power(S, k) for k in range(1, kmax + 1)},
        quotient_dims=quotient_dims(S, kmax),
        chi_ker=chi_ker_check(S.tree),
    )
