import itertools

import pytest
from hypothesis import given, settings, strategies as st

from arboreal.treecat import (
    CompositionError, Correspondence, Tree, TreeError, all_rooted_trees, all_trees, compose,
    count_formula, enumerate_correspondences, leq, parse_compact, path_tree, rooted_quotient,
    star_tree, to_compact, tree_from_json, trees_up_to,
)


def bruteforce_count(vertices, edges):
    # a vertex subset of a tree is connected iff it spans |S|-1 edges
    n = 0
    for r in range(1, len(vertices) + 1):
        for S in itertools.combinations(vertices, r):
            es = [e for e in edges if set(e) <= set(S)]
            if len(es) == len(S) - 1:
                n += 2 ** len(es)
    return n


def bruteforce_leq(p1, p2):
    return [q for q in enumerate_correspondences(p1.quotient_image) if compose(q, p1) == p2]


SMALL = trees_up_to(4)


def test_anchor_counts():
    assert len(enumerate_correspondences(path_tree(2))) == 4
    assert len(enumerate_correspondences(path_tree(3))) == 11


@pytest.mark.parametrize("T", trees_up_to(5), ids=lambda T: "-".join(map("".join, T.sorted_edges)) or "pt")
def test_count_matches_formula_and_oracle(T):
    n = len(enumerate_correspondences(T))
    assert n == count_formula(T) == bruteforce_count(T.vertices, T.sorted_edges)


def test_frozen_counts():
    # independent subset enumeration, frozen
    assert len(enumerate_correspondences(path_tree(4))) == 26
    assert len(enumerate_correspondences(star_tree(3))) == 30
    assert len(enumerate_correspondences(path_tree(5))) == 57
    assert len(enumerate_correspondences(star_tree(4))) == 85


def test_tree_counts():
    assert [len(all_trees(n)) for n in range(1, 7)] == [1, 1, 1, 2, 3, 6]
    assert [len(all_rooted_trees(n)) for n in range(1, 6)] == [1, 1, 2, 4, 9]


def test_trivial_first():
    for T in SMALL:
        p0 = enumerate_correspondences(T)[0]
        assert p0.subtree == frozenset(T.vertices) and not p0.contract


def test_enumeration_is_linear_extension():
    for T in SMALL:
        P = enumerate_correspondences(T)
        for i, j in itertools.product(range(len(P)), repeat=2):
            if i != j and leq(P[i], P[j])[0]:
                assert i < j


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_leq_matches_bruteforce(data):
    T = data.draw(st.sampled_from(SMALL))
    P = enumerate_correspondences(T)
    p1 = data.draw(st.sampled_from(P))
    p2 = data.draw(st.sampled_from(P))
    ok, w = leq(p1, p2)
    wits = bruteforce_leq(p1, p2)
    assert ok == bool(wits)
    if ok:
        assert wits == [w]


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_compose_associative(data):
    T = data.draw(st.sampled_from(SMALL))
    p = data.draw(st.sampled_from(enumerate_correspondences(T)))
    q = data.draw(st.sampled_from(enumerate_correspondences(p.quotient_image)))
    r = data.draw(st.sampled_from(enumerate_correspondences(q.quotient_image)))
    qp = compose(q, p)
    # q's image and qp's image are the same tree under different vertex names
    rename = {u: qp.quotient[next(iter(p.section[next(iter(q.section[u]))]))]
              for u in q.quotient_image.vertices}
    r2 = Correspondence(qp.quotient_image, {rename[v] for v in r.subtree},
                        {frozenset(rename[v] for v in e) for e in r.contract})
    assert compose(r2, qp) == compose(compose(r, q), p)


def test_compose_rejects_mismatch():
    p = enumerate_correspondences(path_tree(3))[-1]
    q = enumerate_correspondences(path_tree(3))[0]
    if p.quotient_image != q.target:
        with pytest.raises(CompositionError):
            compose(q, p)


def test_correspondence_validation():
    T = path_tree(3)
    with pytest.raises(TreeError):
        Correspondence(T, {"a", "c"})
    with pytest.raises(TreeError):
        Correspondence(T, {"a", "b"}, {frozenset(("b", "c"))})


def test_quotient_labels():
    T = path_tree(3)
    p = Correspondence(T, {"a", "b", "c"}, {frozenset(("a", "b"))})
    assert sorted(p.classes, key=sorted) == [frozenset("ab"), frozenset("c")]
    assert len(p.quotient_image.vertices) == 2
    rq = rooted_quotient(p, "c")
    assert rq.root == p.quotient["c"]


def test_parse_roundtrip():
    for rt in all_rooted_trees(4):
        again = parse_compact(to_compact(rt))
        assert again.root == rt.root and again.tree == rt.tree


def test_parse_errors_report_column():
    with pytest.raises(TreeError, match="column 5"):
        parse_compact("b(a,)")
    with pytest.raises(TreeError, match="repeated"):
        parse_compact("a(a)")
    with pytest.raises(TreeError, match="trailing"):
        parse_compact("a)b")


def test_tree_from_json():
    T, root = tree_from_json('{"vertices": ["a", "b"], "edges": [["a", "b"]], "root": "b"}')
    assert root == "b" and T == path_tree(2)
    with pytest.raises(TreeError):
        tree_from_json({"vertices": ["a"]})
    with pytest.raises(TreeError):
        tree_from_json({"vertices": ["a", "b"], "edges": [["a", "b"]], "root": "z"})


def test_not_a_tree():
    with pytest.raises(TreeError):
        Tree(["a", "b", "c"], [("a", "b"), ("b", "a")])
    with pytest.raises(TreeError):
        Tree(["a", "b", "c"], [("a", "b")])
