"""Invariant suites run by ``shifttree verify``.

Each check returns a :class:`Check` with a stable name, the identity it
exercises, a pass flag and a short detail string.  Random inputs come from a
fixed seed so reports are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ShiftTreeError
from .model import (
    kernel_model,
    kernel_partial_sum,
    model_coefficients,
    powers_orthogonal,
    radius_of_convergence,
    reproducing_check,
)
from .rootless import RootlessShift, decompose, index_relation, self_commutator_blocks
from .shift import (
    SparseVector,
    WeightedShift,
    apply,
    apply_adjoint,
    apply_power,
    random_vector,
    spectral_radius,
)
from .spectra import (
    chi_ker_check,
    cowen_douglas_field,
    density_rank,
    dim_ker_adjoint_power,
    dim_ker_adjoint_power_numeric,
    point_spectrum_check,
    quotient_dims,
    unilateral_decomposition,
)

__all__ = ["Check", "Config", "verify_shift", "verify_rootless"]


@dataclass(frozen=True)
class Check:
    name: str
    identity: str
    passed: bool
    detail: str = ""

    def to_dict(self):
        return {"name": self.name, "identity": self.identity, "passed": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class Config:
    n_band: int = 12
    n_radius: int = 256
    n_repro: int = 60
    depth: int = 6
    tol: float = 1e-9
    samples: int = 100
    seed: int = 20240901


def _run(name, identity, fn) -> Check:
    try:
        ok, detail = fn()
    except ShiftTreeError as err:
        return Check(name, identity, False, f"{type(err).__name__}: {err}")
    return Check(name, identity, bool(ok), detail)


def _rel(a: SparseVector, b: SparseVector) -> float:
    return (a - b).norm() / max(1.0, a.norm(), b.norm())


def verify_shift(S: WeightedShift, cfg: Config = Config()) -> list[Check]:
    t = S.tree
    kT = t.branching_index
    rng = np.random.default_rng(cfg.seed)
    vecs = [random_vector(t, rng, cfg.depth, 6) for _ in range(cfg.samples)]
    checks: list[Check] = []

    def add(name, identity, fn):
        checks.append(_run(name, identity, fn))

    def parent_children():
        vs = t.vertices_upto(kT + 4)
        return all(t.parent(c) == v for v in vs for c in t.children(v)), f"{len(vs)} vertices"

    add("parent_of_child", "par(c) = v for every child c of v", parent_children)

    def gen_constant():
        cards = {len(t.generation(n)) for n in range(kT, kT + 21)}
        return len(cards) == 1, f"cards {sorted(cards)}"

    add("generation_size_stable", "card Chi^n(root) constant for n >= k_T", gen_constant)

    def windows():
        for n in range(11):
            for m in range(11):
                meet = bool(set(t.window(n)) & set(t.window(m)))
                if meet != (abs(n - m) <= kT):
                    return False, f"n={n}, m={m}"
        return True, "0 <= n, m <= 10"

    add("window_overlap", "W_n meets W_m iff |n - m| <= k_T", windows)

    def adjoint_pairing():
        worst = 0.0
        for f, g in zip(vecs, vecs[1:] + vecs[:1]):
            lhs, rhs = apply(S, f).inner(g), f.inner(apply_adjoint(S, g))
            worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
        return worst <= 1e-12, f"max rel err {worst:.2e}"

    add("adjoint_pairing", "<S f, g> = <f, S* g>", adjoint_pairing)

    def gram_diag():
        worst = 0.0
        for u in t.core_vertices:
            for k in range(1, 9):
                p = apply_power(S, u, k)
                back = p
                for _ in range(k):
                    back = apply_adjoint(S, back)
                worst = max(worst, _rel(back, (p.norm() ** 2) * SparseVector.basis(u)))
        return worst <= 1e-12, f"max rel err {worst:.2e}"

    add("power_gram_diagonal", "S*^k S^k e_u = |S^k e_u|^2 e_u", gram_diag)

    def left_inverse():
        D = S.dual
        worst = max(_rel(apply_adjoint(D, apply(S, f)), f) for f in vecs)
        return worst <= 1e-12, f"max rel err {worst:.2e}"

    add("dual_left_inverse", "S'* S = I", left_inverse)

    def analytic_support():
        for f in vecs[:20]:
            g = f
            for k in range(1, 9):
                g = apply(S, g)
                if g and min(t.generation_of(v) for v, _ in g) < k:
                    return False, f"support below generation {k}"
        return True, "support of S^k f lies in generations >= k"

    add("analytic_support", "ran S^k has no support below generation k", analytic_support)

    def bounded():
        n = S.norm
        worst = max(apply(S, f).norm() / f.norm() for f in vecs)
        return worst <= n * (1 + 1e-12), f"max ratio {worst:.6g} vs |S| = {n:.6g}"

    add("norm_bound", "|S f| <= sup_u |S e_u| |f|", bounded)

    model = kernel_model(S)

    def cokernel():
        B = model.basis
        G = np.array([[b.inner(a) for b in B.vectors] for a in B.vectors])
        err = np.abs(G - np.eye(B.dim)).max()
        killed = max(apply_adjoint(S, g).norm() for g in B.vectors)
        win = set(t.window(0))
        inside = all(v in win for v in B.support())
        return err <= 1e-12 and killed <= 1e-12 and inside, f"dim E = {B.dim}, orth err {err:.1e}"

    add("cokernel_basis", "orthonormal basis of ker S* inside W_0", cokernel)

    blocks = model.blocks(cfg.n_band)

    def band():
        worst = max(
            (np.abs(B.matrix).max() for (j, k), B in blocks.items() if abs(j - k) > kT),
            default=0.0,
        )
        return worst <= 1e-12, f"max |C_jk| off band {worst:.1e}, j, k <= {cfg.n_band}"

    add("band_vanishing", "C_jk = 0 for |j - k| > k_T", band)

    def edges():
        worst = max(
            (np.abs(B.matrix).max() for (j, k), B in blocks.items() if (j == 0) != (k == 0)),
            default=0.0,
        )
        return worst <= 1e-12, f"max {worst:.1e}"

    add("edge_blocks_vanish", "C_j0 = C_0j = 0 for j >= 1", edges)

    def hermitian():
        worst = max(np.abs(B.matrix - blocks[k, j].matrix.conj().T).max() for (j, k), B in blocks.items())
        return worst <= 1e-12, f"max {worst:.1e}"

    add("block_hermitian", "C_kj = C_jk*", hermitian)

    def tensor():
        if not powers_orthogonal(S):
            return True, "S^k E not mutually orthogonal; nothing to check"
        worst = max((np.abs(B.matrix).max() for (j, k), B in blocks.items() if j != k), default=0.0)
        return worst <= 1e-12, f"orthogonal powers, max off-diagonal block {worst:.1e}"

    add("diagonal_when_orthogonal", "S^k E orthogonal => kernel diagonal", tensor)

    def intertwining():
        worst = 0.0
        for f in vecs:
            a = model_coefficients(S, f)
            b = model_coefficients(S, apply(S, f))
            shifted = np.vstack([np.zeros((1, model.dim)), a.coeffs])
            n = max(len(b), len(shifted))
            d = np.abs(b.padded(n) - np.vstack([shifted, np.zeros((n - len(shifted), model.dim))])).max()
            worst = max(worst, d / max(1.0, np.abs(a.coeffs).max(initial=0)))
        return worst <= 1e-12, f"max rel err {worst:.1e}"

    add("intertwining", "U(S f) = z U(f)", intertwining)

    def injective():
        vs = t.vertices_upto(min(10, cfg.depth + 4))
        cols = []
        for v in vs:
            c = model_coefficients(S, SparseVector.basis(v)).padded(len(vs) + 1)
            cols.append(c.ravel())
        sv = np.linalg.svd(np.array(cols).T, compute_uv=False)
        rank = int(np.sum(sv > 1e-10 * sv[0]))
        return rank == len(vs), f"rank {rank} of {len(vs)}"

    add("model_injective", "U f = 0 => f = 0 on finite supports", injective)

    rad = radius_of_convergence(S, cfg.n_radius)
    r_est = rad.value

    def positivity():
        rho = 0.5 * min(r_est, 1.0 / S.dual.norm)
        worst = math.inf
        for x in np.linspace(-rho, rho, 5):
            for y in np.linspace(-rho, rho, 5):
                z = complex(x, y)
                if abs(z) >= rho * (1 + 1e-12):
                    continue
                K = kernel_partial_sum(S, z, z, cfg.n_repro, radius=r_est)
                worst = min(worst, np.linalg.eigvalsh((K + K.conj().T) / 2).min())
        return worst >= -1e-9, f"min eigenvalue {worst:.3g} on |z| < {rho:.3g}"

    add("kernel_positive", "kappa(z, z) >= 0", positivity)

    def reproducing():
        w = 0.3 if 0.3 < 0.9 * r_est else 0.5 * r_est
        worst = 0.0
        for f in vecs[:10]:
            for g in range(model.dim):
                worst = max(worst, reproducing_check(S, f, g, w, cfg.n_repro, radius=r_est).residual)
        return worst <= 1e-10, f"max residual {worst:.1e} at w = {w:.3g}"

    add("reproducing", "<U f(w), g> = <f, K_w g>", reproducing)

    def kernel_dims():
        bad = [
            (k, dim_ker_adjoint_power(S, k), dim_ker_adjoint_power_numeric(S, k))
            for k in range(1, 6)
            if dim_ker_adjoint_power(S, k) != dim_ker_adjoint_power_numeric(S, k)
        ]
        return not bad, "k <= 5" if not bad else f"mismatch {bad}"

    add("kernel_dimension_oracle", "dim ker S*^k formula = truncated nullity", kernel_dims)

    def quotients():
        q = quotient_dims(S, 6)
        return all(x == model.dim for x in q), f"{q}"

    add("quotient_dims", "dim ker S*^k / ker S*^(k-1) = dim E", quotients)

    def chi_ker():
        rep = chi_ker_check(t)
        return rep.ok, f"dim E = {rep.dim_E}, branch count {rep.branch_count}"

    add("chi_ker", "card Chi^k(root) = dim E for k >= k_T", chi_ker)

    def reassembly():
        dec = unilateral_decomposition(S)
        worst = max(_rel(dec.apply(f), apply(S, f)) for f in vecs)
        return worst == 0.0 and dec.d == model.dim, f"{dec.d} branches, |M| = {dec.M_dim}"

    add("unilateral_reassembly", "S = A + sum of unilateral shifts", reassembly)

    rS = spectral_radius(S, cfg.n_radius)
    rD = spectral_radius(S.dual, cfg.n_radius)

    def r_lambda_dual():
        p = rad.value * rD.value
        kind = "exact" if rad.exact_limit is not None and rD.exact_limit is not None else "estimate"
        return p >= 1 - cfg.tol, f"r_lambda r(S') = {p:.9g} ({kind}, margin {p - 1:.3g})"

    add("radius_dual_product", "r_lambda r(S') >= 1", r_lambda_dual)

    def r_pair():
        p = rS.value * rD.value
        return p >= 1 - cfg.tol, f"r(S) r(S') = {p:.9g}"

    add("spectral_radius_product", "r(S) r(S') >= 1", r_pair)

    delta = 1.0 / S.dual.norm

    def cowen_douglas():
        rho = min(rad.value / 2, 0.9 * delta)
        worst, det = 0.0, math.inf
        for i in range(10):
            w = rho * (i + 1) / 11 * complex(math.cos(2.2 * i), math.sin(2.2 * i))
            fld = cowen_douglas_field(S, w, 80)
            worst = max(worst, fld.residual - fld.tail_bound)
            det = min(det, fld.gram_det)
        return worst <= 1e-12 and det > 1e-9, f"residual - tail <= {worst:.1e}, min gram det {det:.3g}"

    add("eigenvector_field", "(S* - conj w) v_g = 0 up to the tail, dim E independent", cowen_douglas)

    def point_spectrum():
        worst = math.inf
        for w in (0.0, 0.5 * delta, 0.9 * delta * 1j):
            smin, bound = point_spectrum_check(S, w, 12)
            worst = min(worst, smin - bound)
        return worst >= -1e-9, f"min(s_min - (delta - |w|)) = {worst:.3g}"

    add("point_spectrum_empty", "|(S - w) f| >= (delta - |w|) |f|", point_spectrum)

    def density():
        G = min(cfg.depth, 6)
        rank, n = density_rank(S, G, min(rad.value / 2, 0.9 * delta))
        return rank == n, f"rank {rank} of {n} (generations <= {G})"

    add("eigenvector_density", "eigenvectors of S* span each finite window", density)
    return checks


def verify_rootless(R: RootlessShift, cfg: Config = Config()) -> list[Check]:
    rng = np.random.default_rng(cfg.seed)
    vecs = [R.random_vector(rng, cfg.depth, 8) for _ in range(cfg.samples)]
    checks: list[Check] = []

    def add(name, identity, fn):
        checks.append(_run(name, identity, fn))

    def reassembly():
        dec = decompose(R)
        worst = max((R.apply(f) - dec.apply(f)).norm() for f in vecs)
        return worst == 0.0, f"generalized root {dec.omega}, unique={dec.unique}"

    add("rootless_reassembly", "S = T + rank one + backward shift", reassembly)

    def m_T():
        dec = decompose(R)
        return dec.m_T == dec.T.tree.branching_index, f"m_T = {dec.m_T}"

    add("rootless_branching_index", "k of the rooted part = m_T", m_T)

    def index():
        s, m = index_relation(R)
        return s == m + 1, f"ind S = {s}, ind M_z = {m}"

    add("rootless_index", "ind S = ind M_z + 1", index)

    def commutator():
        rep = self_commutator_blocks(R, 8)
        return rep.ok(), f"off-diagonal {rep.off_diagonal:.1e}, blocks {rep.top_left:.1e}/{rep.bottom_right:.1e}"

    add("rootless_commutator", "[S*, S] block diagonal", commutator)

    def extension():
        dec = decompose(R)
        below = [v for v in R.vertices(cfg.depth, below=dec.omega) if dec.chain_index(v) is None]
        worst = 0.0
        for f in vecs:
            g = SparseVector({v: c for v, c in f if v in below})
            worst = max(worst, (R.apply(g) - apply(dec.T, g)).norm())
        return worst == 0.0, f"{len(below)} vertices below {dec.omega}"

    add("rootless_extension", "S agrees with the rooted shift T on vectors below the generalized root", extension)
    return checks
