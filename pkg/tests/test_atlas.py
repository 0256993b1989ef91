import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from arboreal import atlas
from arboreal.linalg import Matrix, PrimeField
from arboreal.quiverrep import ProjComplex, linear_quiver


def orbit_count(n, k):
    # one full pass s_1 ... s_{n-1} cyclically shifts the strands by one place
    seen, c = set(), 0
    for x in range(n):
        if x not in seen:
            c += 1
            while x not in seen:
                seen.add(x)
                x = (x + k) % n
    return c


def test_comb_shape():
    sp = atlas.build_comb(3)
    assert len(sp.charts) == 7 and len(sp.overlaps) == 6
    assert sp.notes["category"] == "Filt_3"
    with pytest.raises(ValueError):
        atlas.build_comb(-1)


def test_comb_relative_euler_random():
    rng = random.Random(11)
    for n in (1, 2, 3):
        sp = atlas.build_comb(n)
        for _ in range(15):
            A = atlas.random_filtration(n, rng)
            B = atlas.random_filtration(n, rng)
            r = atlas.relative_euler_check(sp, A, B)
            assert r.ok, r.to_json()


def test_comb_single_step_example():
    # F_0 = 0 inside F_1 = k: the one-step filtration given by P_1 alone
    sp = atlas.build_comb(1)
    Q = linear_quiver(1)
    X = atlas.comb_object(1, ProjComplex.projective(Q, "1"))
    r = atlas.relative_euler_check(sp, X, X)
    assert r.ok and r.lhs == 1


def test_comb_mod_p():
    rng = random.Random(5)
    sp = atlas.build_comb(2)
    for _ in range(10):
        A = atlas.random_filtration(2, rng, field=PrimeField(3))
        B = atlas.random_filtration(2, rng, field=PrimeField(3))
        assert atlas.relative_euler_check(sp, A, B).ok


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.integers(1, 3))
def test_circle_duality_swap(seed, r1, r2):
    rng = random.Random(seed)
    a = atlas.random_monodromy(rng, r1)
    b = atlas.random_monodromy(rng, r2)
    assert atlas.circle_duality_swap(a, b)
    assert atlas.circle_duality_swap(a, a)


def test_circle_trivial_rank_one():
    one = Matrix.identity(1)
    assert atlas.local_system_hom(one, one) == {0: 1, 1: 1}
    minus = Matrix.identity(1).scale(-1)
    assert atlas.local_system_hom(one, minus) == {0: 0, 1: 0}


def test_local_system_needs_invertible():
    with pytest.raises(ValueError):
        atlas.local_system(Matrix.from_dense([[0]]))


def test_circle_charts():
    assert [c.name for c in atlas.build_circle().charts] == ["A0", "A1", "A2"]
    sp = atlas.build_circle([(Fraction(1, 2), -1), (0, 1)])
    assert sp.notes["spokes"] == [["0", 1], ["1/2", -1]]
    with pytest.raises(atlas.GluingError):
        atlas.build_circle([(0, 1), (1, 1)])
    with pytest.raises(atlas.GluingError):
        atlas.build_circle([(0, 2)])


def test_spoked_circle_object():
    sp = atlas.build_circle([(0, 1), (Fraction(1, 2), -1)])
    I = Matrix.identity(1)
    X = atlas.spoked_circle_object(sp, [1, 1], [1, 0], [I, I], [I, Matrix(1, 0)])
    c = atlas.rep_hom_complex(X, X)
    assert c.check()
    assert c.euler() == sum(d * d for d in X.dims.values()) - sum(
        X.dims[s] * X.dims[t] for s, t, _ in X.arrows)
    with pytest.raises(ValueError):
        atlas.spoked_circle_object(sp, [1, 1], [1, 0], [I, Matrix.from_dense([[0]])], [I, Matrix(1, 0)])


def test_w1():
    assert atlas.w1(atlas.build_comb(3)).trivial
    assert atlas.w1(atlas.build_circle()).trivial
    r = atlas.w1(atlas.build_circle([(0, 1)], reverse_at=0))
    assert r.cycle_products == [-1] and not r.trivial
    # the class does not depend on where the spanning tree starts
    sp = atlas.build_circle([(0, 1), (Fraction(1, 3), -1)], reverse_at=2)
    assert {tuple(atlas.w1(sp, c.name).cycle_products) for c in sp.charts} == {(-1,)}


def test_w1_even_number_of_reversals_trivial():
    sp = atlas.build_circle()
    sp.overlaps[0].sign = -1
    sp.overlaps[1].sign = -1
    assert atlas.w1(sp).trivial


def test_inconsistent_triple_rejected():
    charts = [atlas._smooth_chart(n) for n in "abc"]
    ovs = [atlas.Overlap("a", "b", {"base": "base"}, 1), atlas.Overlap("b", "c", {"base": "base"}, 1),
           atlas.Overlap("a", "c", {"base": "base"}, -1)]
    with pytest.raises(atlas.GluingError):
        atlas.GluedSpace(1, charts, ovs, [], [(0, 1, 2)])


def test_trefoil():
    link = atlas.irregular_type_to_link(2, 3, halfinteger=True)
    assert link.components == 1 and link.name == "trefoil"
    assert atlas.irregular_type_to_link(2, 3).components == 2


@pytest.mark.parametrize("n", range(1, 7))
def test_torus_components(n):
    for r in range(1, 7):
        link = atlas.irregular_type_to_link(n, r)
        assert link.components == orbit_count(n, 2 * r) == atlas.torus_components_formula(n, 2 * r)
        half = atlas.irregular_type_to_link(n, r, halfinteger=True)
        assert half.components == orbit_count(n, r)


def test_braid_permutation():
    assert atlas.braid_permutation(3, [1]) == [1, 0, 2]
    assert atlas.braid_permutation(3, [1, 2]) == [2, 0, 1]
    assert atlas.cycle_count([1, 0, 2]) == 2
