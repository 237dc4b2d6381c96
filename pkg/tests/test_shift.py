import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import dyadic_shift
from shifttree import (
    Core,
    Ray,
    SparseVector,
    WeightedShift,
    WeightSequence,
    apply,
    apply_adjoint,
    apply_adjoint_power,
    apply_power,
    builtin,
    cauchy_dual,
    column_norm,
    spectral_radius,
)
from shifttree.errors import InvalidWeights, NotLeftInvertible
from shifttree.shift import random_vector
from shifttree.spectra import truncated_matrix

BUILTINS = ["T1", "T2", "T3", "T4", "Tfan(3)"]


def t1_const(c):
    return WeightedShift(builtin("T1"), {}, {"1": WeightSequence.constant(c)})


def test_apply_t1():
    S = t1_const(2.0)
    assert dict(apply(S, SparseVector.basis(Core("0")))) == {Ray("1", 0): 2.0}
    assert not apply(S, SparseVector())


def test_apply_t2_root():
    t = builtin("T2")
    S = WeightedShift(t, {}, {"1": WeightSequence((0.7,), (1.0,)), "2": WeightSequence((1.9,), (1.0,))})
    out = apply(S, SparseVector.basis(t.root))
    assert dict(out) == {Ray("1", 0): 0.7, Ray("2", 0): 1.9}


def test_apply_power_t1():
    S = t1_const(2.0)
    assert dict(apply_power(S, Core("0"), 2)) == {Ray("1", 1): 4.0}
    assert dict(apply_power(S, Core("0"), 0)) == {Core("0"): 1.0}


def test_isometric_powers_keep_norm():
    S = WeightedShift.isometric(builtin("T2"))
    for k in range(11):
        assert apply_power(S, S.tree.root, k).norm() == pytest.approx(1.0, rel=1e-12)


def test_fan_power_inner_product():
    # Tfan labels: (1, k) is Ray(k, 0) and (2, k) is Ray(k, 1)
    S = WeightedShift.random(builtin("Tfan(3)"), np.random.default_rng(3))

    def lam(i, k):
        return S.weight(Ray(str(k), i - 1))

    g2 = SparseVector({Ray("0", 0): lam(1, 1), Ray("1", 0): -lam(1, 0)})
    lhs = apply_power(S, S.tree.root, 2).inner(apply(S, g2))
    assert lhs == pytest.approx(lam(1, 0) * lam(1, 1) * (lam(2, 0) ** 2 - lam(2, 1) ** 2), rel=1e-12)


def test_adjoint_power_t1():
    S = t1_const(2.0)
    assert dict(apply_adjoint_power(S, Ray("1", 2), 2)) == {Ray("1", 0): 4.0}
    assert not apply_adjoint_power(S, Core("0"), 1)
    assert not apply_adjoint_power(S, Ray("1", 1), 3)


def test_column_norms():
    t = builtin("T2")
    S = WeightedShift(t, {}, {"1": WeightSequence((1.0,), (5.0,)), "2": WeightSequence((1.0,), (1.0,))})
    assert column_norm(S, t.root) == pytest.approx(math.sqrt(2))
    assert column_norm(S, Ray("1", 3)) == 5.0
    assert S.column_norm_bounds() == (1.0, 5.0)
    N = S.normalized()
    for v in N.tree.vertices_upto(6):
        assert column_norm(N, v) == pytest.approx(1.0)


def test_cauchy_dual_t2():
    t = builtin("T2")
    S = WeightedShift(t, {}, {"1": WeightSequence((0.5, 2.0), (3.0,)), "2": WeightSequence((1.5, 0.25), (1.0, 4.0))})
    D = cauchy_dual(S)
    s = 0.5**2 + 1.5**2
    assert D.weight(Ray("1", 0)) == pytest.approx(0.5 / s)
    assert D.weight(Ray("2", 0)) == pytest.approx(1.5 / s)
    for d in range(1, 8):
        for r in ("1", "2"):
            assert D.weight(Ray(r, d)) == pytest.approx(1 / S.weight(Ray(r, d)))


def test_cauchy_dual_isometric_and_constant():
    S = WeightedShift.isometric(builtin("T4"))
    D = cauchy_dual(S)
    for v in S.tree.vertices_upto(8)[1:]:
        assert D.weight(v) == pytest.approx(S.weight(v))
    D1 = cauchy_dual(t1_const(2.0))
    assert [D1.weight(Ray("1", d)) for d in range(5)] == [0.5] * 5


def test_zero_weight_policies():
    t = builtin("T2")
    with pytest.raises(NotLeftInvertible):
        WeightedShift(t, {}, {"1": WeightSequence((1.0,), (0.0,)), "2": WeightSequence((), (1.0,))})
    with pytest.raises(InvalidWeights):
        WeightedShift(t, {}, {"1": WeightSequence((0.0,), (1.0,)), "2": WeightSequence((), (1.0,))})
    with pytest.raises(InvalidWeights, match="missing"):
        WeightedShift(t, {}, {"1": WeightSequence((), (1.0,))})
    with pytest.raises(InvalidWeights, match="unknown"):
        WeightedShift(builtin("T3"), {"(1,1)": 1.0, "zz": 2.0}, {"2": 1.0, "3": 1.0})


def test_spectral_radius_isometric_and_t1():
    r = spectral_radius(WeightedShift.isometric(builtin("T2")), 30)
    assert r.exact_limit == 1.0
    assert np.allclose(r.sequence, 1.0)
    r = spectral_radius(t1_const(1.7), 10)
    assert r.exact_limit == pytest.approx(1.7)
    assert np.allclose(r.sequence, 1.7)


def test_spectral_radius_periodic_limit():
    S = WeightedShift(builtin("T1"), {}, {"1": WeightSequence((5.0,), (2.0, 0.5))})
    r = spectral_radius(S, 400)
    assert r.exact_limit == pytest.approx(1.0)
    assert r.sequence[-1] == pytest.approx(1.0, abs=0.01)
    assert r.sequence[0] == pytest.approx(5.0)


def test_dyadic_dual_radius_sequence():
    r = spectral_radius(dyadic_shift().dual, 1024)
    assert r.exact_limit is None
    assert r.sequence[-1] == pytest.approx(2.0)


@pytest.mark.parametrize("name", BUILTINS)
def test_power_norm_matches_truncated_matrix(name):
    S = WeightedShift.default(builtin(name))
    D = S.tree.core_depth + 6
    cols = S.tree.vertices_upto(D)
    b = spectral_radius(S, 5).sequence
    for n in range(1, 6):
        rows = S.tree.vertices_upto(D + n)

        def op(f, n=n):
            for _ in range(n):
                f = apply(S, f)
            return f

        smax = np.linalg.svd(truncated_matrix(S, cols, rows, op), compute_uv=False).max()
        assert smax == pytest.approx(b[n - 1] ** n, rel=1e-12)


def test_lineage_membership_counts_each_vertex_once():
    t = builtin("T4")
    L, member, rows = WeightedShift.default(t).lineage_table(10)
    for g in range(11):
        assert member[:, g].sum() == len(t.generation(g))


# -- property checks on random weights -------------------------------------

seeds = st.integers(0, 2**32 - 1)


@pytest.mark.parametrize("name", BUILTINS)
@given(seed=seeds)
def test_adjoint_pairing(name, seed):
    rng = np.random.default_rng(seed)
    S = WeightedShift.random(builtin(name), rng)
    f, g = random_vector(S.tree, rng), random_vector(S.tree, rng)
    lhs, rhs = apply(S, f).inner(g), f.inner(apply_adjoint(S, g))
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


@pytest.mark.parametrize("name", BUILTINS)
@given(seed=seeds)
def test_left_inverse(name, seed):
    rng = np.random.default_rng(seed)
    S = WeightedShift.random(builtin(name), rng)
    f = random_vector(S.tree, rng)
    back = apply_adjoint(S.dual, apply(S, f))
    assert (back - f).norm() <= 1e-12 * f.norm()
    back = apply_adjoint(S, apply(S.dual, f))
    assert (back - f).norm() <= 1e-12 * f.norm()


@pytest.mark.parametrize("name", BUILTINS)
def test_power_gram_diagonal(name):
    S = WeightedShift.random(builtin(name), np.random.default_rng(11))
    for u in S.tree.core_vertices:
        for k in range(1, 9):
            p = apply_power(S, u, k)
            q = p
            for _ in range(k):
                q = apply_adjoint(S, q)
            assert (q - p.norm() ** 2 * SparseVector.basis(u)).norm() <= 1e-12 * p.norm() ** 2


@pytest.mark.parametrize("name", BUILTINS)
@given(seed=seeds, k=st.integers(1, 8))
def test_support_moves_down(name, seed, k):
    rng = np.random.default_rng(seed)
    S = WeightedShift.random(builtin(name), rng)
    f = random_vector(S.tree, rng, depth=5)
    g = f
    for _ in range(k):
        g = apply(S, g)
    lowest = min(S.tree.generation_of(v) for v, _ in f)
    assert min(S.tree.generation_of(v) for v, _ in g) == lowest + k


@pytest.mark.parametrize("name", BUILTINS)
@given(seed=seeds)
def test_norm_bound(name, seed):
    rng = np.random.default_rng(seed)
    S = WeightedShift.random(builtin(name), rng)
    f = random_vector(S.tree, rng)
    assert apply(S, f).norm() <= S.norm * f.norm() * (1 + 1e-12)


def test_sparse_vector_algebra():
    a = SparseVector({Core("x"): 1 + 1j, Core("y"): 2})
    b = SparseVector({Core("y"): 1j})
    assert a.inner(b) == pytest.approx(2 * (-1j))
    assert (a - a).norm() == 0
    assert dict(np.complex128(2.0) * b) == dict(2 * b)
    assert a.norm() == pytest.approx(math.sqrt(6))
