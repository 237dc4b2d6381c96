import numpy as np
import pytest
from hypothesis import given, strategies as st

from shifttree import Core, Ray, SparseVector, WeightedShift, WeightSequence, builtin
from shifttree.errors import NoGeneralizedRoot, NotFredholm, UnknownBuiltin
from shifttree.rootless import (
    Back,
    RootlessShift,
    branching_index,
    decompose,
    essential_spectrum,
    from_parts,
    generalized_root,
    index_relation,
    rootless_builtin,
    self_commutator_blocks,
)

FINITE = ["R2", "Line", "Rdeep"]
seeds = st.integers(0, 2**32 - 1)


def test_r2_root_and_index():
    R = rootless_builtin("R2")
    root = generalized_root(R)
    assert root.vertex == Core("0") and root.unique and root.chain == ()
    assert branching_index(R) == 1
    assert index_relation(R) == (-1, -2)


def test_r2_decomposition_parts():
    R = rootless_builtin("R2", WeightSequence((0.8,), (1.5, 0.5)))
    dec = decompose(R)
    assert dec.T.tree.branching_index == 1
    assert [dec.T.weight(Ray(r, d)) for r in ("1", "2") for d in range(4)] == [
        R.weight(Ray(r, d)) for r in ("1", "2") for d in range(4)
    ]
    # rank-one piece: lambda_0 e_0 (x) e_{-1}
    assert dec.lambda_omega == 0.8
    assert dec.chain(1) == Back(1)
    assert [dec.beta[k] for k in range(4)] == [1.5, 0.5, 1.5, 0.5]


def test_line_is_non_unique():
    R = rootless_builtin("Line")
    root = generalized_root(R)
    assert not root.unique
    assert branching_index(R) == 0
    assert index_relation(R) == (0, -1)


def test_deep_example():
    R = rootless_builtin("Rdeep")
    root = generalized_root(R)
    assert root.vertex == Core("c")
    assert root.chain == (Core("b"), Core("a"))
    assert branching_index(R) == 2
    assert index_relation(R) == (-2, -3)
    dec = decompose(R)
    assert dec.chain(1) == Core("b") and dec.chain(3) == Back(1)
    assert [dec.beta[k] for k in range(4)] == [R.weight(Core("b")), R.weight(Core("a")), R.back[1], R.back[2]]


def test_lattice_has_no_root():
    R = rootless_builtin("Lattice")
    with pytest.raises(NoGeneralizedRoot, match="may not exist"):
        generalized_root(R)
    with pytest.raises(NoGeneralizedRoot):
        decompose(R)


def test_unknown_rootless_builtin():
    with pytest.raises(UnknownBuiltin):
        rootless_builtin("nope")


@pytest.mark.parametrize("name", FINITE)
def test_sub_branching_matches(name):
    R = rootless_builtin(name)
    dec = decompose(R)
    assert dec.T.tree.branching_index == branching_index(R)


@pytest.mark.parametrize("name", FINITE)
@given(seed=seeds)
def test_reassembly(name, seed):
    rng = np.random.default_rng(seed)
    R = rootless_builtin(name)
    dec = decompose(R)
    f = R.random_vector(rng)
    assert dict(dec.apply(f)) == dict(R.apply(f))


@pytest.mark.parametrize("name", FINITE)
@given(seed=seeds)
def test_rootless_adjoint_pairing(name, seed):
    rng = np.random.default_rng(seed)
    R = rootless_builtin(name)
    f, g = R.random_vector(rng), R.random_vector(rng)
    lhs, rhs = R.apply(f).inner(g), f.inner(R.apply_adjoint(g))
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_parent_and_children_of_chain():
    R = rootless_builtin("R2")
    assert R.parent(Core("0")) == Back(1)
    assert R.parent(Back(3)) == Back(4)
    assert R.children(Back(1)) == [Core("0")]
    assert R.children(Back(2)) == [Back(1)]


@pytest.mark.parametrize("name", FINITE)
def test_commutator_blocks(name):
    rep = self_commutator_blocks(rootless_builtin(name), G=8)
    assert rep.off_diagonal == 0.0
    assert rep.ok(1e-12)


def test_commutator_isometric():
    t = rootless_builtin("R2").tree
    R = RootlessShift(WeightedShift.isometric(t), WeightSequence.constant(1.0))
    rep = self_commutator_blocks(R, G=8)
    assert rep.off_diagonal == 0.0 and rep.ok(1e-12)


def test_commutator_direct_entry():
    # [S*, S] e_{v1} = (|S e_{v1}|^2 - beta_1^2) e_{v1} on R2
    R = rootless_builtin("R2", WeightSequence((0.8,), (1.5, 0.5)))
    e = SparseVector.basis(Back(1))
    comm = R.apply_adjoint(R.apply(e)) - R.apply(R.apply_adjoint(e))
    assert dict(comm) == pytest.approx({Back(1): 0.8**2 - 1.5**2})


def test_essential_spectrum_union():
    R = rootless_builtin("R2", WeightSequence((1.0,), (2.0,)))
    ess = essential_spectrum(R, 64)
    model = sorted((a.inner, a.outer) for a in ess["model"])
    assert len(model) == 2
    assert ess["backward"].inner == ess["backward"].outer == 2.0


def test_zero_back_weight_not_fredholm():
    R = rootless_builtin("R2", WeightSequence((1.0,), (1.0, 0.0)))
    with pytest.raises(NotFredholm):
        index_relation(R)


def test_from_parts_flags():
    S = WeightedShift.default(builtin("T2"))
    R = from_parts(S, {"prefix": [1.0], "period": [2.0]})
    assert not R.branching_back and index_relation(R) == (-1, -2)
    R = from_parts(S, {"period": [1.0], "branching": True})
    with pytest.raises(NoGeneralizedRoot):
        generalized_root(R)
