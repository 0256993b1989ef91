import pytest

from arboreal.hochschild import (
    block_words, cyclic_dense, cyclic_truncated, hochschild, hochschild_dense,
    reversed_differential_squares_to_zero, trivial_mixed_prediction,
)
from arboreal.linalg import PrimeField
from arboreal.quiverrep import PathAlgebra
from arboreal.treecat import parse_compact, rooted_trees_up_to


def test_dense_and_blocks_agree_a2():
    A = PathAlgebra(parse_compact("b(a)"))
    assert hochschild(A, 3).dims == hochschild_dense(A, 3)


def test_dense_and_blocks_agree_a3():
    for t in ("b(a,c)", "c(b(a))"):
        A = PathAlgebra(parse_compact(t))
        assert hochschild(A, 2).dims == hochschild_dense(A, 2)


def test_cyclic_dense_agrees():
    A = PathAlgebra(parse_compact("b(a)"))
    hc = cyclic_truncated(A, 3)
    dense = cyclic_dense(A, 3)
    assert {n: dense[n] for n in hc.trusted} == hc.trusted


@pytest.mark.parametrize("rt", rooted_trees_up_to(4), ids=str)
def test_tree_hochschild(rt):
    A = PathAlgebra(rt)
    res = hochschild(A, 3)
    assert res.dims == {0: len(rt.vertices), 1: 0, 2: 0, 3: 0}
    assert res.chain_dims_checked
    assert res.hh0_basis == [A.name(A.idempotent[v]) for v in A.vertices]


def test_prime_field():
    A = PathAlgebra(parse_compact("c(a,b)"))
    assert hochschild(A, 2, PrimeField(2)).dims == {0: 3, 1: 0, 2: 0}


def test_cyclic_prediction():
    assert trivial_mixed_prediction(3, 3) == {0: 3, 1: 0, 2: 3, 3: 0}
    A = PathAlgebra(parse_compact("b(a,c)"))
    hc = cyclic_truncated(A, 4)
    assert hc.trusted == trivial_mixed_prediction(3, 3)
    assert hc.edge_degree == 4 and "edge_degree_untrusted" in hc.to_json()


def test_literal_reversed_differential_fails():
    # the differential written on x_n (x) ... (x) x_0 with the wraparound term
    # first does not square to zero; the standard one does
    A = PathAlgebra(parse_compact("b(a)"))
    assert not reversed_differential_squares_to_zero(A, 3)


def test_gap_words_are_rotation_classes():
    A = PathAlgebra(parse_compact("b(a,c)"))
    words = block_words(A, 3)
    seen = set()
    for ws in words.values():
        for w in ws:
            assert w not in seen
            seen.add(w)
    assert len(seen) > 0


def test_negative_degree_bound():
    A = PathAlgebra(parse_compact("b(a)"))
    with pytest.raises(ValueError):
        hochschild(A, -1)
