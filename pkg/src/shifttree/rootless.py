"""Rootless trees with finite branching index.

Encoded as a rooted tree (its root is the topmost listed vertex) plus an
infinite backward chain ``Back(1), Back(2), ...`` above it.  ``back[0]`` is
the weight of the top vertex, ``back[k]`` the weight of ``Back(k)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidWeights, NoGeneralizedRoot, NotFredholm, UnknownBuiltin
from .model import cokernel_basis
from .shift import SparseVector, WeightedShift, apply, apply_adjoint
from .spectra import Annulus, annulus_of, ap_spectrum_annuli
from .tree import Core, DirectedTree, VertexId
from .weights import WeightSequence

__all__ = [
    "Back",
    "RootlessShift",
    "GeneralizedRoot",
    "Decomposition",
    "CommutatorReport",
    "generalized_root",
    "branching_index",
    "decompose",
    "index_relation",
    "essential_spectrum",
    "self_commutator_blocks",
    "rootless_builtin",
    "ROOTLESS_BUILTINS",
    "from_parts",
]

NO_ROOT_MSG = "The generalized root may not exist"


@dataclass(frozen=True)
class Back:
    """k-th vertex of the backward chain above the top of the rooted part (k >= 1)."""

    k: int

    def __str__(self):
        return f"back{self.k}"


class RootlessShift:
    """Weighted shift on (rooted part) + backward chain.

    ``branching_back`` marks inputs whose backward chain itself branches
    (the lattice pattern), which has no generalized root.
    """

    def __init__(self, rooted: WeightedShift, back: WeightSequence, *, branching_back: bool = False):
        self.rooted = rooted
        self.back = back
        self.branching_back = branching_back
        self.tree = rooted.tree

    @property
    def top(self) -> Core:
        return self.tree.root

    def parent(self, v):
        if isinstance(v, Back):
            return Back(v.k + 1)
        if v == self.top:
            return Back(1)
        return self.tree.parent(v)

    def children(self, v):
        if isinstance(v, Back):
            return [self.top] if v.k == 1 else [Back(v.k - 1)]
        return self.tree.children(v)

    def weight(self, v) -> float:
        if isinstance(v, Back):
            return self.back[v.k]
        if v == self.top:
            return self.back[0]
        return self.rooted.weight(v)

    def apply(self, f: SparseVector) -> SparseVector:
        out: dict = {}
        for v, c in f:
            for w in self.children(v):
                out[w] = out.get(w, 0) + self.weight(w) * c
        return SparseVector(out)

    def apply_adjoint(self, f: SparseVector) -> SparseVector:
        out: dict = {}
        for v, c in f:
            p = self.parent(v)
            out[p] = out.get(p, 0) + self.weight(v) * c
        return SparseVector(out)

    def vertices(self, depth: int, below: VertexId | None = None) -> list:
        """Vertices within ``depth`` generations below ``below`` (default top) plus Back(1..depth)."""
        below = below or self.top
        out, level = [], [below]
        for _ in range(depth + 1):
            out += level
            level = [c for u in level for c in self.children(u)]
        chain = []
        v = below
        for _ in range(depth):
            v = self.parent(v)
            chain.append(v)
        return chain[::-1] + out

    def random_vector(self, rng: np.random.Generator, depth: int = 6, nnz: int = 6) -> SparseVector:
        pool = self.vertices(depth)
        idx = sorted(rng.choice(len(pool), size=min(nnz, len(pool)), replace=False))
        vals = rng.standard_normal(len(idx)) + 1j * rng.standard_normal(len(idx))
        return SparseVector({pool[i]: c for i, c in zip(idx, vals)})


@dataclass(frozen=True)
class GeneralizedRoot:
    vertex: Core
    unique: bool
    chain: tuple  # core vertices strictly above it, nearest first


def generalized_root(S: RootlessShift) -> GeneralizedRoot:
    """First vertex with two or more children walking down from the top.

    Without branching vertices every vertex qualifies; the top is returned
    with ``unique=False``.
    """
    if S.branching_back:
        raise NoGeneralizedRoot(f"{NO_ROOT_MSG}: the backward chain branches at every level")
    t = S.tree
    if not t.branching_vertices:
        return GeneralizedRoot(S.top, False, ())
    v, above = S.top, []
    while t.out_degree(v) == 1:
        above.append(v)
        (v,) = t.children(v)
    return GeneralizedRoot(v, True, tuple(reversed(above)))


def branching_index(S: RootlessShift) -> int:
    """m_T: 1 + the largest distance from a branching vertex down to a branching descendant."""
    t = S.tree
    bv = t.branching_vertices
    if not bv:
        return 0
    best = 0
    for u in bv:
        for w in bv:
            d = t.generation_of(w) - t.generation_of(u)
            if d >= 0 and t.ancestor(w, d) == u:
                best = max(best, d)
    return best + 1


def _subtree(t: DirectedTree, omega: Core) -> DirectedTree:
    edges = []
    queue = [omega]
    rays = []
    while queue:
        u = queue.pop()
        for c in t.children(u):
            if isinstance(c, Core):
                edges.append((u.name, c.name))
                queue.append(c)
            else:
                rays.append((u.name, c.ray))
    order = {e: i for i, e in enumerate(t.core_edges)}
    edges.sort(key=lambda e: order[e])
    return DirectedTree(omega.name, edges, rays, name=f"{t.name or 'T'}^(1)")


@dataclass
class Decomposition:
    """S = (T + rank one) on l2(V1) + B on the backward chain.

    ``chain(k)`` is v_k = par^k(omega); ``B e_{v_{k+1}} = beta[k-1] e_{v_k}``,
    ``B e_{v_1} = 0``; the rank-one piece sends e_{v_1} to lambda_omega e_omega.
    """

    omega: Core
    unique: bool
    T: WeightedShift
    lambda_omega: float
    beta: WeightSequence
    above: tuple
    m_T: int

    def chain(self, k: int):
        if k <= len(self.above):
            return self.above[k - 1]
        return Back(k - len(self.above))

    def chain_index(self, v) -> int | None:
        if isinstance(v, Back):
            return len(self.above) + v.k
        if v in self.above:
            return self.above.index(v) + 1
        return None

    def apply(self, f: SparseVector) -> SparseVector:
        """Block action T + lambda_omega e_omega (x) e_{v1} + B."""
        top, chain = {}, {}
        for v, c in f:
            k = self.chain_index(v)
            (chain if k is not None else top)[v] = c
        out = apply(self.T, SparseVector(top))
        extra: dict = {}
        for v, c in chain.items():
            k = self.chain_index(v)
            if k == 1:
                extra[self.omega] = extra.get(self.omega, 0) + self.lambda_omega * c
            else:
                u = self.chain(k - 1)
                extra[u] = extra.get(u, 0) + self.beta[k - 2] * c
        return out + SparseVector(extra)


def decompose(S: RootlessShift) -> Decomposition:
    root = generalized_root(S)
    omega = root.vertex
    t = S.tree
    sub = _subtree(t, omega)
    cw = {u.name: S.rooted.weight(u) for u in sub.core_vertices[1:]}
    rw = {r: S.rooted.ray_weights[r] for r in sub.ray_ids}
    T = WeightedShift(sub, cw, rw)
    lam = S.weight(omega)
    # beta[k-1] is the weight of v_k; core vertices above omega come first
    above = root.chain
    beta = S.back.shifted(1).with_prefix([S.weight(v) for v in above])
    m_T = branching_index(S)
    if m_T and sub.branching_index != m_T:
        raise AssertionError(f"k of the rooted part ({sub.branching_index}) differs from m_T ({m_T})")
    return Decomposition(omega, root.unique, T, lam, beta, above, m_T)


def index_relation(S: RootlessShift) -> tuple[int, int]:
    """(ind S, ind M_z) where M_z models the rooted part; ind S = ind M_z + 1."""
    dec = decompose(S)
    lo, _ = S.rooted.column_norm_bounds()
    back_lo = float(S.back.values((S.back.scan_length or 4096) + 1).min())
    if min(lo, back_lo) <= 0:
        raise NotFredholm("S is not left-invertible, so not Fredholm")
    t = S.tree
    ind_S = -sum(t.out_degree(v) - 1 for v in t.branching_vertices)
    ind_Mz = -cokernel_basis(dec.T).dim
    if ind_S != ind_Mz + 1:
        raise AssertionError(f"index relation fails: {ind_S} != {ind_Mz} + 1")
    return ind_S, ind_Mz


def essential_spectrum(S: RootlessShift, N: int = 256) -> dict:
    """Branch annuli of the rooted model together with the annulus of the backward chain."""
    dec = decompose(S)
    branch = ap_spectrum_annuli(dec.T, N)
    back: Annulus = annulus_of(dec.beta, N, branch=-1)
    return {"model": branch, "backward": back}


@dataclass(frozen=True)
class CommutatorReport:
    off_diagonal: float
    top_left: float
    bottom_right: float
    size: int

    def ok(self, tol: float = 0.0) -> bool:
        return self.off_diagonal <= tol and max(self.top_left, self.bottom_right) <= max(tol, 1e-12)


def self_commutator_blocks(S: RootlessShift, G: int = 8) -> CommutatorReport:
    """Check [S*, S] against ([T*,T] - lam^2 e_w(x)e_w) + ([B*,B] + lam^2 e_v1(x)e_v1) on depth-G vectors.

    ``off_diagonal`` is the largest entry of [S*, S] between the two halves
    (zero exactly, not up to rounding); the other two fields are the largest
    deviations inside the diagonal blocks.
    """
    dec = decompose(S)
    lam2 = dec.lambda_omega**2
    verts = S.vertices(G, below=dec.omega)
    off = tl = br = 0.0
    for v in verts:
        e = SparseVector.basis(v)
        comm = S.apply_adjoint(S.apply(e)) - S.apply(S.apply_adjoint(e))
        k = dec.chain_index(v)
        if k is None:
            model = apply_adjoint(dec.T, apply(dec.T, e)) - apply(dec.T, apply_adjoint(dec.T, e))
            if v == dec.omega:
                model = model - lam2 * e
        else:
            # B e_{v_k} = beta[k-2] e_{v_{k-1}}, B* e_{v_k} = beta[k-1] e_{v_{k+1}}
            bb = dec.beta[k - 2] ** 2 if k >= 2 else 0.0
            bbs = dec.beta[k - 1] ** 2
            model = SparseVector({v: bb - bbs})
            if k == 1:
                model = model + lam2 * e
        for u, c in comm:
            same_side = (dec.chain_index(u) is None) == (k is None)
            if not same_side:
                off = max(off, abs(c))
        diff = (comm - model).norm()
        if k is None:
            tl = max(tl, diff)
        else:
            br = max(br, diff)
    return CommutatorReport(off, tl, br, len(verts))


def _six(back=None):
    t = DirectedTree("0", [], [("0", "1"), ("0", "2")], name="rootless-T2")
    S = WeightedShift.default(t)
    return RootlessShift(S, back or WeightSequence((1.0,), (1.0,)))


def _line(back=None):
    t = DirectedTree("0", [], [("0", "1")], name="bilateral")
    S = WeightedShift.default(t)
    return RootlessShift(S, back or WeightSequence((1.0,), (1.0,)))


def _deep(back=None):
    t = DirectedTree(
        "a",
        [("a", "b"), ("b", "c"), ("c", "d")],
        [("c", "1"), ("d", "2"), ("d", "3")],
        name="rootless-deep",
    )
    S = WeightedShift.default(t)
    return RootlessShift(S, back or WeightSequence((1.2, 0.9), (1.0, 2.0)))


def _lattice(back=None):
    S = _six(back)
    return RootlessShift(S.rooted, S.back, branching_back=True)


ROOTLESS_BUILTINS = {"R2": _six, "Line": _line, "Rdeep": _deep, "Lattice": _lattice}


def rootless_builtin(name: str, back: WeightSequence | None = None) -> RootlessShift:
    try:
        return ROOTLESS_BUILTINS[name](back)
    except KeyError:
        raise UnknownBuiltin(name) from None


def from_parts(rooted: WeightedShift, back_desc) -> RootlessShift:
    """Build from a rooted shift and a ``back_ray`` descriptor (may carry ``"branching": true``)."""
    if back_desc is None:
        raise InvalidWeights("rootless spec needs a 'back_ray' entry")
    branching = bool(back_desc.get("branching", False)) if isinstance(back_desc, dict) else False
    return RootlessShift(rooted, WeightSequence.from_dict(back_desc), branching_back=branching)
