"""Command-line front end.

Trees are given inline in nested-parentheses notation, outermost vertex the
root (``b(a,c)`` is a -> b <- c), or as a path to a JSON file
``{"vertices": [...], "edges": [[u, v], ...], "root": "b"}``.
Every command writes a JSON report (sorted keys, schema ``arboreal-report/1``)
to --out or stdout and exits 0 iff every verdict in it passes.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from . import atlas, cellsheaf, hochschild, quiverrep
from .arbspace import build_nerve
from .linalg import FieldError, parse_field
from .treecat import (RootedTree, Tree, TreeError, count_formula, enumerate_correspondences,
                      parse_compact, rooted_quotient, rooted_trees_up_to, to_compact, tree_from_json)

SCHEMA = "arboreal-report/1"
HARD_CAP = 6


class InputError(ValueError):
    pass


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(_jsonable(v) for v in x)
    if isinstance(x, Fraction):
        return str(x)
    return x


def load_tree(source: str) -> Tuple[Tree, Optional[str]]:
    """Inline compact notation or a JSON file path."""
    if os.path.exists(source):
        with open(source) as fh:
            text = fh.read()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise InputError(f"{source}: malformed JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
        try:
            return tree_from_json(data)
        except TreeError as e:
            raise InputError(f"{source}: {e}") from None
    s = source.strip()
    if s.startswith("{"):
        try:
            data = json.loads(s)
        except json.JSONDecodeError as e:
            raise InputError(f"malformed JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
        try:
            return tree_from_json(data)
        except TreeError as e:
            raise InputError(str(e)) from None
    try:
        rt = parse_compact(s)
    except TreeError as e:
        raise InputError(str(e)) from None
    return rt.tree, rt.root


def load_rooted(source: str) -> RootedTree:
    T, root = load_tree(source)
    if root is None:
        raise InputError("this command needs a rooted tree (give 'root' in the JSON)")
    return RootedTree(T, root)


# ---------------------------------------------------------------------------
# commands: each returns (result dict, verdict bool) or a text export


def cmd_enumerate(args, field):
    T, _ = load_tree(args.tree)
    corrs = enumerate_correspondences(T)
    formula = count_formula(T)
    res = {"count": len(corrs), "formula": formula,
           "correspondences": [dict(p.to_json(), label=p.label(), size_R=len(p)) for p in corrs]}
    return res, len(corrs) == formula


def cmd_nerve(args, field):
    T, _ = load_tree(args.tree)
    nv = build_nerve(T)
    if args.format == "dot":
        return nv.to_dot(), True
    counts = nv.counts()
    ok = nv.check_boundary_squared(field)
    res = {"counts": counts, "total": sum(counts.values()), "boundary_squared_zero": ok,
           "open_part": len(nv.open_simplices),
           "strata": [{"label": p.label(), "dim": nv.stratum_dim(i)} for i, p in enumerate(nv.corrs)]}
    return res, ok


def cmd_hochschild(args, field):
    rt = load_rooted(args.tree)
    A = quiverrep.PathAlgebra(rt)
    hh = hochschild.hochschild(A, args.degree_bound, field)
    hc = hochschild.cyclic_truncated(A, args.degree_bound, field)
    expect_hh = {i: (len(rt) if i == 0 else 0) for i in range(args.degree_bound + 1)}
    expect_hc = hochschild.trivial_mixed_prediction(len(rt), args.degree_bound - 1)
    ok = hh.dims == expect_hh and hc.trusted == expect_hc
    return {"hochschild": hh.to_json(), "cyclic": hc.to_json(),
            "cyclic_trusted": hc.trusted}, ok


def cmd_homsheaf(args, field):
    rt = load_rooted(args.tree)
    N = cellsheaf.nadler_sheaf(rt, field=field)
    for v in (args.alpha, args.beta):
        if v not in rt.vertices:
            raise InputError(f"unknown vertex {v!r}")
    A = quiverrep.ProjComplex.projective(rt, args.alpha, 0, field)
    B = quiverrep.ProjComplex.projective(rt, args.beta, 0, field)
    H = cellsheaf.hom_sheaf(N, A, B)
    from .arbspace import hom_support
    supp = hom_support(N.nerve, rt.root, args.alpha, args.beta)
    stalks = {}
    ok = True
    for p, c in enumerate(N.nerve.corrs):
        dims = H.stalk_dims(p)
        stalks[c.label()] = dims
        expect = {0: 1} if p in supp.strata else {}
        ok &= dims == expect
    glob = cellsheaf.cohomology(H)
    expect_glob = {0: 1} if rt.geq(args.beta, args.alpha) else {}
    ok &= glob == expect_glob and not H.check_functorial()
    return {"stalks": stalks, "support_size": len(supp.strata), "global_sections": glob}, ok


def cmd_dualizing(args, field):
    T, _ = load_tree(args.tree)
    c = cellsheaf.compare_dualizing(T, field)
    return c.to_json(), c.ok


def cmd_orient(args, field):
    rt = load_rooted(args.tree)
    r = cellsheaf.verify_orientation(rt, args.orientation_sign, field)
    return r.to_json(), r.ok


def cmd_nondegen(args, field):
    rt = load_rooted(args.tree)
    r = cellsheaf.verify_nondegeneracy(rt, args.orientation_sign, field)
    return r.to_json(), r.verdict


def cmd_comb(args, field):
    rng = random.Random(args.seed)
    space = atlas.build_comb(args.n)
    out = []
    ok = True
    for t in range(args.trials):
        A = atlas.random_filtration(args.n, rng, 3, field)
        B = atlas.random_filtration(args.n, rng, 3, field)
        r = atlas.relative_euler_check(space, A, B)
        out.append(r.to_json())
        ok &= r.ok
    return {"space": space.to_json(), "trials": out, "seed": args.seed}, ok


def cmd_circle(args, field):
    rng = random.Random(args.seed)
    out = []
    ok = True
    for t in range(args.trials):
        r1 = rng.randint(1, 3)
        a = atlas.random_monodromy(rng, r1, field)
        b = a if rng.random() < 0.3 else atlas.random_monodromy(rng, rng.randint(1, 3), field)
        swap = atlas.circle_duality_swap(a, b)
        out.append({"hom": atlas.local_system_hom(a, b), "hom_reversed": atlas.local_system_hom(b, a),
                    "swap": swap})
        ok &= swap
    return {"space": atlas.build_circle().to_json(), "trials": out, "seed": args.seed}, ok


def _parse_spokes(text: str):
    spokes = []
    if not text:
        return spokes
    for item in text.split(","):
        try:
            p, c = item.split(":")
            spokes.append((Fraction(p), int(c)))
        except ValueError:
            raise InputError(f"bad spoke {item!r}; use position:coorientation, e.g. 1/3:-1") from None
    return spokes


def cmd_w1(args, field):
    if args.space == "comb":
        space = atlas.build_comb(args.n)
    else:
        try:
            space = atlas.build_circle(_parse_spokes(args.spokes), args.reverse_at)
        except atlas.GluingError as e:
            raise InputError(str(e)) from None
    r = atlas.w1(space)
    res = {"space": space.to_json(), "w1": r.to_json()}
    # the verdict is that the class is a well-defined cocycle: every spanning tree agrees
    ok = all(sorted(atlas.w1(space, c.name).cycle_products) == sorted(r.cycle_products)
             for c in space.charts)
    return res, ok


def cmd_stokes(args, field):
    link = atlas.irregular_type_to_link(args.n, args.r, args.half_integer)
    k = link.crossings_per_strand
    ok = link.components == atlas.torus_components_formula(args.n, k)
    return link.to_json(), ok


def cmd_sweep(args, field):
    if args.max_tree_size > HARD_CAP:
        raise InputError(f"--max-tree-size is capped at {HARD_CAP}")
    results = {}
    ok_all = True
    seen_trees = set()
    for rt in rooted_trees_up_to(args.max_tree_size):
        name = to_compact(rt)
        checks = {}
        T = rt.tree
        key = tuple(sorted(T.sorted_edges)), T.vertices
        nv = build_nerve(T)
        checks["count_formula"] = len(nv.corrs) == count_formula(T)
        checks["boundary_squared_zero"] = nv.check_boundary_squared(field)
        A = quiverrep.PathAlgebra(rt)
        hh = hochschild.hochschild(A, args.degree_bound, field)
        checks["hochschild"] = hh.dims == {i: (len(rt) if i == 0 else 0) for i in range(args.degree_bound + 1)}
        k0 = True
        for p in nv.corrs:
            rq = rooted_quotient(p, rt.root)
            m = quiverrep.hh_map(p)
            rv = list(p.quotient_image.vertices)
            for j, a in enumerate(rt.vertices):
                dv = quiverrep.pushforward_dimension_vector(p, rt.root, a, field)
                cls = quiverrep.k0_class(dv, rq, field)
                col = {rv[i]: m[i, j] for i in range(len(rv)) if m[i, j]}
                k0 &= cls == col
        checks["hh_map_vs_k0"] = k0
        if key not in seen_trees:
            seen_trees.add(key)
            checks["dualizing"] = cellsheaf.compare_dualizing(T, field, nv).ok
        checks["orientation"] = cellsheaf.verify_orientation(rt, args.orientation_sign, field, nv).ok
        checks["nondegeneracy"] = all(cellsheaf.verify_nondegeneracy(rt, s, field, nv).verdict for s in (1, -1))
        results[name] = checks
        ok_all &= all(checks.values())
    return {"trees": results, "max_tree_size": args.max_tree_size}, ok_all


COMMANDS = {
    "enumerate": cmd_enumerate, "nerve": cmd_nerve, "hochschild": cmd_hochschild,
    "homsheaf": cmd_homsheaf, "dualizing": cmd_dualizing, "orient": cmd_orient,
    "nondegen": cmd_nondegen, "comb": cmd_comb, "circle": cmd_circle, "w1": cmd_w1,
    "stokes-link": cmd_stokes, "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", default="rational", help="rational, or a prime p")
    common.add_argument("--max-tree-size", type=int, default=4)
    common.add_argument("--degree-bound", type=int, default=4)
    common.add_argument("--orientation-sign", type=int, choices=(1, -1), default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="report path (default: stdout)")
    common.add_argument("--format", choices=("json", "dot"), default="json")

    p = argparse.ArgumentParser(prog="arboreal", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("enumerate", "nerve", "hochschild", "dualizing", "orient", "nondegen"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("tree")
    s = sub.add_parser("homsheaf", parents=[common])
    s.add_argument("tree")
    s.add_argument("--alpha", required=True)
    s.add_argument("--beta", required=True)
    s = sub.add_parser("comb", parents=[common])
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--trials", type=int, default=50)
    s = sub.add_parser("circle", parents=[common])
    s.add_argument("--trials", type=int, default=50)
    s = sub.add_parser("w1", parents=[common])
    s.add_argument("--space", choices=("comb", "circle"), default="circle")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--spokes", default="", help="e.g. 0:1,1/2:-1")
    s.add_argument("--reverse-at", type=int, default=None)
    s = sub.add_parser("stokes-link", parents=[common])
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--half-integer", action="store_true")
    sub.add_parser("sweep", parents=[common])
    return p


def _config(args) -> Dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("out",)}
    return _jsonable(cfg)


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        field = parse_field(args.field)
    except FieldError as e:
        parser.error(str(e))
    if args.max_tree_size > HARD_CAP:
        parser.error(f"--max-tree-size is capped at {HARD_CAP}")
    try:
        res, ok = COMMANDS[args.command](args, field)
    except InputError as e:
        print(f"arboreal: error: {e}", file=sys.stderr)
        return 2
    if isinstance(res, str):
        text = res
    else:
        report = {"schema": SCHEMA, "command": args.command, "config": _config(args),
                  "result": _jsonable(res), "verdict": "pass" if ok else "fail"}
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
