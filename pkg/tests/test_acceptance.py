"""Acceptance gate: one test per criterion, each printing a single PASS/FAIL line.

Everything is exact; a criterion passes only with zero mismatches and within
its runtime budget.
"""
import random
import time

import pytest

from arboreal import atlas, cellsheaf, hochschild, quiverrep
from arboreal.arbspace import build_nerve, hom_support
from arboreal.treecat import (count_formula, enumerate_correspondences, parse_compact, path_tree,
                              rooted_quotient, rooted_trees_up_to, trees_up_to)


@pytest.fixture
def verdict(capsys):
    def emit(n, ok, elapsed, budget, detail=""):
        fine = ok and elapsed < budget
        line = f"{'PASS' if fine else 'FAIL'} criterion {n}: {detail} ({elapsed:.2f}s, budget {budget}s)"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
        assert elapsed < budget, line
    return emit


def test_criterion_01_correspondence_counts(verdict):
    t = time.perf_counter()
    ok = len(enumerate_correspondences(path_tree(2))) == 4
    ok &= len(enumerate_correspondences(path_tree(3))) == 11
    trees = trees_up_to(5)
    bad = [T for T in trees if len(enumerate_correspondences(T)) != count_formula(T)]
    verdict(1, ok and not bad, time.perf_counter() - t, 1,
            f"A2=4, A3=11, formula on {len(trees)} trees, {len(bad)} mismatches")


def test_criterion_02_nerve_counts(verdict):
    t = time.perf_counter()
    nv = build_nerve(path_tree(3))
    ok = nv.counts() == {0: 11, 1: 22, 2: 12} and len(nv.simplices) == 45
    trees = trees_up_to(5)
    bad = [T for T in trees if not build_nerve(T).check_boundary_squared()]
    verdict(2, ok and not bad, time.perf_counter() - t, 10,
            f"A3 nerve (11,22,12), boundary^2=0 on {len(trees)} trees, {len(bad)} failures")


def test_criterion_03_hochschild(verdict):
    t = time.perf_counter()
    trees = rooted_trees_up_to(5)
    bad = []
    for rt in trees:
        res = hochschild.hochschild(quiverrep.PathAlgebra(rt), 4)
        if res.dims != {0: len(rt.vertices), 1: 0, 2: 0, 3: 0, 4: 0} or not res.chain_dims_checked:
            bad.append(rt)
    verdict(3, not bad, time.perf_counter() - t, 120,
            f"HH_0=k^|Q|, HH_1..4=0 on {len(trees)} rooted trees, {len(bad)} failures")


def test_criterion_04_functoriality_oracle(verdict):
    t = time.perf_counter()
    checked, bad = 0, 0
    for rt in rooted_trees_up_to(4):
        for p in enumerate_correspondences(rt.tree):
            rq = rooted_quotient(p, rt.root)
            m = quiverrep.hh_map(p)
            rv = list(p.quotient_image.vertices)
            for j, a in enumerate(rt.vertices):
                dv = quiverrep.pushforward_dimension_vector(p, rt.root, a)
                col = {rv[i]: m[i, j] for i in range(len(rv)) if m[i, j]}
                checked += 1
                bad += quiverrep.k0_class(dv, rq) != col
    verdict(4, bad == 0, time.perf_counter() - t, 60,
            f"hh_map vs K0 class of c_p(P_a), {checked} columns, {bad} mismatches")


def test_criterion_05_dualizing_complex(verdict):
    t = time.perf_counter()
    trees = trees_up_to(4)
    results = [cellsheaf.compare_dualizing(T) for T in trees]
    bad = [r.tree for r in results if not r.ok]
    verdict(5, not bad, time.perf_counter() - t, 300,
            f"closed-form omega vs D(k) on open part, {len(trees)} trees, failures {bad}")


def test_criterion_06_canonical_orientation(verdict):
    t = time.perf_counter()
    trees = rooted_trees_up_to(5)
    reports = [cellsheaf.verify_orientation(rt) for rt in trees]
    bad = [r.tree for r in reports if not r.ok]
    dims = {r.end_dim for r in reports}
    verdict(6, not bad, time.perf_counter() - t, 300,
            f"HH sheaf = omega[1-|T|] with commuting squares, End(omega) dims {sorted(dims)}, "
            f"{len(trees)} rooted trees, failures {bad}")


def test_criterion_07_nondegeneracy(verdict):
    t = time.perf_counter()
    trees = rooted_trees_up_to(4)
    bad = []
    pairs = 0
    for rt in trees:
        for sign in (1, -1):
            r = cellsheaf.verify_nondegeneracy(rt, sign)
            pairs += len(r.duality_ok)
            if not r.verdict:
                bad.append((r.tree, sign))
    verdict(7, not bad, time.perf_counter() - t, 600,
            f"{pairs} ordered projective pairs over {len(trees)} rooted trees x 2 signs, failures {bad}")


def test_criterion_08_hom_sheaf_supports(verdict):
    t = time.perf_counter()
    bad, checked = 0, 0
    for rt in rooted_trees_up_to(4):
        N = cellsheaf.nadler_sheaf(rt)
        for a in rt.vertices:
            for b in rt.vertices:
                H = cellsheaf.hom_sheaf(N, quiverrep.ProjComplex.projective(rt, a),
                                        quiverrep.ProjComplex.projective(rt, b))
                supp = hom_support(N.nerve, rt.root, a, b).strata
                for p in range(len(N.nerve.corrs)):
                    checked += 1
                    bad += H.stalk_dims(p) != ({0: 1} if p in supp else {})
    # a -> b <- c: the two Hom sheaves between the leaves swap under duality
    rt = parse_compact("b(a,c)")
    N = cellsheaf.nadler_sheaf(rt)
    nv = N.nerve
    P = lambda v: quiverrep.ProjComplex.projective(rt, v)
    D = cellsheaf.verdier_dual(cellsheaf.hom_sheaf(N, P("a"), P("c")).pullback(), nv.open_part())
    F = cellsheaf.hom_sheaf(N, P("c"), P("a")).pullback()
    d_supp = {s for s in nv.open_simplices if D.stalk_dims(s)}
    f_supp = {s for s in nv.open_simplices if F.stalk_dims(s)}
    single = all(D.stalk_dims(s) == {-2: 1} for s in d_supp)
    swap = bool(d_supp) and d_supp == f_supp and single
    verdict(8, bad == 0 and swap, time.perf_counter() - t, 60,
            f"{checked} stalks rank-one on T(a,b) exactly, {bad} mismatches; "
            f"A3 leaves swapped by duality: {swap}")


def test_criterion_09_cyclic_homology(verdict):
    t = time.perf_counter()
    trees = rooted_trees_up_to(4)
    bad = []
    for rt in trees:
        hc = hochschild.cyclic_truncated(quiverrep.PathAlgebra(rt), 4)
        if hc.trusted != hochschild.trivial_mixed_prediction(len(rt.vertices), 3):
            bad.append(rt)
    verdict(9, not bad, time.perf_counter() - t, 120,
            f"HC_0..3 = (k^|Q|,0,k^|Q|,0) on {len(trees)} rooted trees, {len(bad)} failures")


def test_criterion_10_comb_and_circle(verdict):
    t = time.perf_counter()
    rng = random.Random(2024)
    comb_bad = 0
    for i in range(50):
        n = 1 + i % 3
        sp = atlas.build_comb(n)
        r = atlas.relative_euler_check(sp, atlas.random_filtration(n, rng), atlas.random_filtration(n, rng))
        comb_bad += not r.ok
    circ_bad = 0
    for _ in range(50):
        a = atlas.random_monodromy(rng, rng.randint(1, 3))
        b = atlas.random_monodromy(rng, rng.randint(1, 3))
        circ_bad += not atlas.circle_duality_swap(a, b)
    verdict(10, comb_bad == 0 and circ_bad == 0, time.perf_counter() - t, 30,
            f"comb relative Euler 50 instances ({comb_bad} bad), circle swap 50 instances ({circ_bad} bad)")


def _orbits(n, k):
    seen, c = set(), 0
    for x in range(n):
        if x not in seen:
            c += 1
            while x not in seen:
                seen.add(x)
                x = (x + k) % n
    return c


def test_criterion_11_stokes_links(verdict):
    t = time.perf_counter()
    ok = atlas.irregular_type_to_link(2, 3, halfinteger=True).components == 1
    bad = [(n, r) for n in range(1, 7) for r in range(1, 7)
           if not atlas.irregular_type_to_link(n, r).components == _orbits(n, 2 * r) == atlas.torus_components_formula(n, 2 * r)]
    verdict(11, ok and not bad, time.perf_counter() - t, 1,
            f"trefoil has 1 component, (n,2r) gcd for n,r <= 6, mismatches {bad}")
