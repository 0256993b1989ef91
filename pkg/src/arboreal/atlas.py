"""Glued locally arboreal spaces of dimension <= 2 and their computable shadows.

Charts are products Star_k x R^m (or smooth R^d).  Gluing data are pairwise
overlaps carrying a permutation of disc labels and an orientation sign; the
first obstruction w1 compares local orientations across overlaps.  Global
objects are modeled as quiver representations on the exit-path data:
filtrations for the comb, local systems and spoked circles for S^1.
"""
from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .linalg import QQ, CochainComplex, Field, Matrix
from .quiverrep import Filtration, ProjComplex, hom_complex, linear_quiver


class GluingError(ValueError):
    pass


@dataclass
class Chart:
    name: str
    model: str  # "star" or "smooth"
    leaves: int = 0  # k for Star_k
    extra_dim: int = 0  # the trivial R^m factor
    root: str = "base"
    labels: Tuple[str, ...] = ()
    sign: int = 1

    @property
    def dim(self):
        return (1 if self.model == "star" else 0) + self.extra_dim

    def to_json(self):
        return {"name": self.name, "model": self.model, "leaves": self.leaves,
                "extra_dim": self.extra_dim, "root": self.root, "labels": list(self.labels),
                "sign": self.sign}


@dataclass
class Overlap:
    a: str
    b: str
    perm: Dict[str, str] = dc_field(default_factory=dict)
    sign: int = 1

    def to_json(self):
        return {"a": self.a, "b": self.b, "perm": dict(sorted(self.perm.items())), "sign": self.sign}


@dataclass
class GluedSpace:
    dim: int
    charts: List[Chart]
    overlaps: List[Overlap]
    boundary: List[str] = dc_field(default_factory=list)
    triples: List[Tuple[int, int, int]] = dc_field(default_factory=list)
    notes: Dict[str, object] = dc_field(default_factory=dict)

    def __post_init__(self):
        names = [c.name for c in self.charts]
        if len(set(names)) != len(names):
            raise GluingError("chart names must be distinct")
        known = set(names)
        for o in self.overlaps:
            if o.a not in known or o.b not in known:
                raise GluingError(f"overlap refers to unknown chart {o.a!r}/{o.b!r}")
            if o.sign not in (1, -1):
                raise GluingError("transition sign must be +1 or -1")
        for c in self.charts:
            if c.model == "star" and (c.leaves < 1 or len(c.labels) not in (0, c.leaves + 1)):
                raise GluingError(f"chart {c.name}: Star_k needs k >= 1 and k+1 disc labels")
        self.check_triples()

    def chart(self, name) -> Chart:
        for c in self.charts:
            if c.name == name:
                return c
        raise KeyError(name)

    def check_triples(self):
        """Overlaps (ab, bc, ac) listed in ``triples`` must compose."""
        for i, j, k in self.triples:
            ab, bc, ac = self.overlaps[i], self.overlaps[j], self.overlaps[k]
            if not (ab.b == bc.a and ab.a == ac.a and bc.b == ac.b):
                raise GluingError(f"triple {(i, j, k)} is not of the form ab, bc, ac")
            if ab.sign * bc.sign != ac.sign:
                raise GluingError(f"signs do not compose on triple {(i, j, k)}")
            comp = {x: bc.perm[y] for x, y in ab.perm.items() if y in bc.perm}
            if any(ac.perm.get(x) != y for x, y in comp.items()):
                raise GluingError(f"label permutations do not compose on triple {(i, j, k)}")

    def to_json(self):
        return {"dim": self.dim, "charts": [c.to_json() for c in self.charts],
                "overlaps": [o.to_json() for o in self.overlaps],
                "boundary": list(self.boundary), "triples": [list(t) for t in self.triples],
                "notes": self.notes}


def _star_chart(name, k=1, sign=1, extra_dim=0):
    labels = ("base",) + tuple(f"leaf{i}" for i in range(1, k + 1))
    return Chart(name, "star", k, extra_dim, "base", labels, sign)


def _smooth_chart(name, d=1, sign=1):
    return Chart(name, "smooth", 0, d, "base", ("base",), sign)


# ---------------------------------------------------------------------------
# the comb


def build_comb(n: int) -> GluedSpace:
    """R with n cones on points at infinity: Star_1 charts p_1..p_n along a line."""
    if n < 0:
        raise ValueError("n >= 0")
    charts = [_smooth_chart("I0")]
    overlaps = []
    for i in range(1, n + 1):
        charts.append(_star_chart(f"p{i}"))
        charts.append(_smooth_chart(f"I{i}"))
        overlaps.append(Overlap(f"I{i - 1}", f"p{i}", {"base": "base"}, 1))
        overlaps.append(Overlap(f"p{i}", f"I{i}", {"base": "base"}, 1))
    boundary = ["-inf", "+inf"] + [f"spoke{i}" for i in range(1, n + 1)]
    groups = {"F0": ["-inf"], **{f"gr{i}": [f"+inf", f"-spoke{i}"] for i in range(1, n + 1)},
              f"F{n}": ["+inf"]}
    return GluedSpace(1, charts, overlaps, boundary, [], {"category": f"Filt_{n}",
                                                          "boundary_groups": groups})


def comb_object(n: int, X: ProjComplex) -> Filtration:
    return Filtration(n, X)


def boundary_restriction(F: Filtration) -> Tuple[List[CochainComplex], CochainComplex]:
    """(F_0, gr_1, ..., gr_n; F_n)."""
    return F.associated_graded()


def graded_dims(pieces: Sequence[CochainComplex]) -> List[Dict[int, int]]:
    return [p.cohomology_dims() for p in pieces]


@dataclass
class RelativeEulerResult:
    lhs: int
    rhs: int
    hom_ab: Dict[int, int]
    hom_ba: Dict[int, int]
    boundary_term: int

    @property
    def ok(self):
        return self.lhs == self.rhs

    def to_json(self):
        return {"lhs": self.lhs, "rhs": self.rhs, "ok": self.ok,
                "hom_ab": {str(k): v for k, v in sorted(self.hom_ab.items())},
                "hom_ba": {str(k): v for k, v in sorted(self.hom_ba.items())},
                "boundary_term": self.boundary_term}


def _chi(dims: Dict[int, int]) -> int:
    return sum((-1) ** (i % 2) * v for i, v in dims.items())


def relative_euler_check(space: GluedSpace, A: Filtration, B: Filtration) -> RelativeEulerResult:
    """chi Hom(A,B) = (-1)^{d+1} [chi Hom_bd(dB, dA) - chi Hom(B,A)] on the comb.

    Hom_bd is computed in the product of the graded-piece and top categories,
    each a category of complexes of vector spaces.
    """
    d = space.dim
    if A.n != B.n:
        raise ValueError("filtrations of different lengths")
    for F in (A, B):
        for j in range(1, F.n + 1):
            if not F.inclusion(j).is_chain_map():
                raise ValueError("filtration maps are not chain maps")
    hab = hom_complex(A.complex, B.complex)[0].cohomology_dims()
    hba = hom_complex(B.complex, A.complex)[0].cohomology_dims()
    ga, ta = A.associated_graded()
    gb, tb = B.associated_graded()
    bterm = 0
    for pb, pa in zip(gb + [tb], ga + [ta]):
        bterm += _chi(pb.cohomology_dims()) * _chi(pa.cohomology_dims())
    lhs = _chi(hab)
    rhs = (-1) ** (d + 1) * (bterm - _chi(hba))
    return RelativeEulerResult(lhs, rhs, hab, hba, bterm)


def random_filtration(n: int, rng: random.Random, max_dim: int = 3, field: Field = QQ) -> Filtration:
    """A random complex of projectives on the linear quiver 0 -> ... -> n.

    Three consecutive degrees; the second differential is drawn from the
    legal maps killing the image of the first, so d^2 = 0 by construction.
    """
    Q = linear_quiver(n)
    verts = [str(i) for i in range(n + 1)]
    base = rng.randint(-1, 1)
    terms = {base + i: tuple(rng.choice(verts) for _ in range(rng.randint(0, max_dim))) for i in range(3)}
    t0, t1, t2 = terms[base], terms[base + 1], terms[base + 2]

    def rand_legal(src, tgt):
        ent = []
        for j, y in enumerate(tgt):
            for k, x in enumerate(src):
                if Q.geq(y, x) and rng.random() < 0.7:
                    ent.append((j, k, rng.randint(-2, 2)))
        return Matrix.from_entries(len(tgt), len(src), ent, field)

    d0 = rand_legal(t0, t1)
    # d1 must satisfy d1 d0 = 0 and be legal: solve for the legal entries
    legal = [(j, k) for j, y in enumerate(t2) for k, x in enumerate(t1) if Q.geq(y, x)]
    if legal and len(t0):
        rows = []
        d0d = d0.to_dense()
        for j in range(len(t2)):
            for c in range(len(t0)):
                row = {}
                for v, (jj, k) in enumerate(legal):
                    if jj == j and d0d[k][c]:
                        row[v] = d0d[k][c]
                if row:
                    rows.append(row)
        ns = Matrix(len(rows), len(legal), field, dict(enumerate(rows))).nullspace().columns()
        ent = {}
        for col in ns:
            c = rng.randint(-2, 2)
            for v, x in col.items():
                ent[legal[v]] = ent.get(legal[v], 0) + c * x
        d1 = Matrix.from_entries(len(t2), len(t1), ((j, k, v) for (j, k), v in ent.items()), field)
    else:
        d1 = rand_legal(t1, t2) if not len(t0) else Matrix(len(t2), len(t1), field)
    X = ProjComplex(Q, terms, {base: d0, base + 1: d1}, field)
    return Filtration(n, X)


# ---------------------------------------------------------------------------
# circles


def build_circle(spokes: Sequence[Tuple[object, int]] = (), reverse_at: Optional[int] = None) -> GluedSpace:
    """S^1 with Star_1 charts at the spokes, smooth arcs between them.

    ``reverse_at`` makes that overlap orientation-reversing (for w1 tests).
    Without spokes the circle is covered by three arcs.
    """
    pos = [Fraction(p) % 1 for p, _ in spokes]
    if len(set(pos)) != len(pos):
        raise GluingError("spoke positions must be distinct")
    for _, c in spokes:
        if c not in (1, -1):
            raise GluingError("coorientation is +1 or -1")
    order = sorted(range(len(spokes)), key=lambda i: pos[i])
    charts: List[Chart] = []
    if not spokes:
        names = ["A0", "A1", "A2"]
        charts = [_smooth_chart(nm) for nm in names]
    else:
        names = []
        for r, i in enumerate(order):
            ch = _star_chart(f"s{r}")
            ch.labels = ("base", "leaf1")
            charts.append(ch)
            charts.append(_smooth_chart(f"A{r}"))
            names += [f"s{r}", f"A{r}"]
    overlaps = []
    m = len(names)
    for i in range(m):
        a, b = names[i], names[(i + 1) % m]
        overlaps.append(Overlap(a, b, {"base": "base"}, -1 if reverse_at == i else 1))
    notes = {"spokes": [[str(pos[i]), spokes[i][1]] for i in order]}
    return GluedSpace(1, charts, overlaps, [], [], notes)


class QuiverObject:
    """A finite-dimensional representation of a quiver with possible cycles.

    ``arrows`` are (source, target, matrix).  Invertibility can be demanded on
    chosen arrows (the smooth directions).
    """

    def __init__(self, dims: Dict[str, int], arrows: Sequence[Tuple[str, str, Matrix]],
                 invertible: Sequence[int] = (), field: Field = QQ):
        self.dims = dict(dims)
        self.arrows = list(arrows)
        self.field = field
        for s, t, m in self.arrows:
            if m.shape != (self.dims[t], self.dims[s]):
                raise ValueError(f"arrow {s}->{t} has shape {m.shape}")
        for i in invertible:
            if not self.arrows[i][2].is_invertible():
                raise ValueError(f"arrow {i} must be invertible")


def rep_hom_complex(X: QuiverObject, Y: QuiverObject) -> CochainComplex:
    """Hom(X,Y): sum_v Hom(X_v, Y_v) -> sum_arrows Hom(X_s, Y_t), f -> Y_a f_s - f_t X_a."""
    field = X.field
    vs = sorted(X.dims)
    off, o = {}, 0
    for v in vs:
        off[v] = o
        o += Y.dims[v] * X.dims[v]
    n0 = o
    ent = []
    r0 = 0
    for (s, t, xa), (s2, t2, ya) in zip(X.arrows, Y.arrows):
        if (s, t) != (s2, t2):
            raise ValueError("objects on different quivers")
        xd, yd = xa.to_dense(), ya.to_dense()
        ys, xs = Y.dims[t], X.dims[s]
        for r in range(ys):
            for c in range(xs):
                row = r0 + r * xs + c
                # (Y_a f_s)[r][c] = sum_k Y_a[r][k] f_s[k][c]
                for k in range(Y.dims[s]):
                    if yd[r][k]:
                        ent.append((row, off[s] + k * X.dims[s] + c, yd[r][k]))
                # (f_t X_a)[r][c] = sum_k f_t[r][k] X_a[k][c]
                for k in range(X.dims[t]):
                    if xd[k][c]:
                        ent.append((row, off[t] + r * X.dims[t] + k, -xd[k][c]))
        r0 += ys * xs
    d = Matrix.from_entries(r0, n0, ent, field)
    return CochainComplex({0: n0, 1: r0}, {0: d}, field)


def local_system(rho: Matrix, field: Field = QQ) -> QuiverObject:
    if not rho.is_invertible():
        raise ValueError("monodromy must be invertible")
    return QuiverObject({"v": rho.nrows}, [("v", "v", rho)], [0], field)


def local_system_hom(rho: Matrix, rho2: Matrix) -> Dict[int, int]:
    """(h0, h1) of Hom(L, L') on S^1: the two-term complex f -> rho' f - f rho."""
    c = rep_hom_complex(local_system(rho), local_system(rho2))
    dims = c.cohomology_dims()
    return {0: dims.get(0, 0), 1: dims.get(1, 0)}


def circle_duality_swap(rho: Matrix, rho2: Matrix) -> bool:
    """h^i Hom(L, L') = h^{1-i} Hom(L', L)."""
    a = local_system_hom(rho, rho2)
    b = local_system_hom(rho2, rho)
    return a[0] == b[1] and a[1] == b[0]


def random_monodromy(rng: random.Random, rank: int, field: Field = QQ) -> Matrix:
    while True:
        m = Matrix.from_dense([[rng.choice((-1, 0, 0, 1, 2)) for _ in range(rank)] for _ in range(rank)], field)
        if m.is_invertible():
            return m


def spoked_circle_object(space: GluedSpace, arcs: Sequence[int], spoke_dims: Sequence[int],
                         crossings: Sequence[Matrix], legs: Sequence[Matrix], field: Field = QQ) -> QuiverObject:
    """Representation for a circle with spokes: arc spaces V_r, spoke spaces W_r.

    Crossing spoke r is an isomorphism V_{r-1} -> V_r; the spoke contributes
    W_r -> V_r or W_r -> V_{r-1} according to its coorientation.
    """
    sp = space.notes.get("spokes", [])
    m = len(sp)
    if not (len(arcs) == len(spoke_dims) == len(crossings) == len(legs) == m):
        raise ValueError("one arc, spoke space, crossing and leg per spoke")
    dims = {f"V{r}": arcs[r] for r in range(m)}
    dims.update({f"W{r}": spoke_dims[r] for r in range(m)})
    arrows = []
    for r in range(m):
        arrows.append((f"V{(r - 1) % m}", f"V{r}", crossings[r]))
    for r in range(m):
        tgt = f"V{r}" if sp[r][1] == 1 else f"V{(r - 1) % m}"
        arrows.append((f"W{r}", tgt, legs[r]))
    return QuiverObject(dims, arrows, list(range(m)), field)


# ---------------------------------------------------------------------------
# w1


@dataclass
class W1Result:
    values: Dict[int, int]
    cycle_products: List[int]
    trivial: bool

    def to_json(self):
        return {"values": {str(k): v for k, v in sorted(self.values.items())},
                "cycle_products": self.cycle_products, "trivial": self.trivial}


def w1(space: GluedSpace, start: Optional[str] = None) -> W1Result:
    """Orientation comparison on overlaps and its products around chart-graph cycles.

    w(ab) = o_a * t_ab * o_b with o the charts' reference orientation signs
    and t the transition sign.  Fundamental cycles come from a BFS spanning
    tree started at ``start``; the class is trivial iff every product is +1.
    """
    space.check_triples()
    o = {c.name: c.sign for c in space.charts}
    vals = {i: o[ov.a] * ov.sign * o[ov.b] for i, ov in enumerate(space.overlaps)}
    adj: Dict[str, List[Tuple[str, int]]] = {c.name: [] for c in space.charts}
    for i, ov in enumerate(space.overlaps):
        adj[ov.a].append((ov.b, i))
        adj[ov.b].append((ov.a, i))
    names = [c.name for c in space.charts]
    root = start if start is not None else names[0]
    pot: Dict[str, int] = {}
    tree_edges = set()
    products = []
    for r in [root] + names:
        if r in pot:
            continue
        pot[r] = 1
        todo = deque([r])
        while todo:
            v = todo.popleft()
            for w, i in adj[v]:
                if w not in pot:
                    pot[w] = pot[v] * vals[i]
                    tree_edges.add(i)
                    todo.append(w)
    for i, ov in enumerate(space.overlaps):
        if i not in tree_edges:
            products.append(pot[ov.a] * vals[i] * pot[ov.b])
    return W1Result(vals, products, all(p == 1 for p in products))


# ---------------------------------------------------------------------------
# Stokes links


@dataclass
class StokesLink:
    strands: int
    crossings_per_strand: int
    word: List[int]
    permutation: List[int]
    components: int
    name: str

    def to_json(self):
        return {"strands": self.strands, "k": self.crossings_per_strand, "word": self.word,
                "permutation": self.permutation, "components": self.components, "name": self.name}


def torus_braid_word(n: int, k: int) -> List[int]:
    """(s_1 s_2 ... s_{n-1})^k with generators numbered 1..n-1."""
    return list(range(1, n)) * k


def braid_permutation(n: int, word: Sequence[int]) -> List[int]:
    """Strand permutation of a braid word: perm[i] = final position of the strand starting at i."""
    pos = list(range(n))  # pos[strand] = position
    at = list(range(n))  # at[position] = strand
    for g in word:
        i = g - 1
        a, b = at[i], at[i + 1]
        at[i], at[i + 1] = b, a
        pos[a], pos[b] = i + 1, i
    return pos


def cycle_count(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    c = 0
    for i in range(len(perm)):
        if not seen[i]:
            c += 1
            j = i
            while not seen[j]:
                seen[j] = True
                j = perm[j]
    return c


def irregular_type_to_link(n: int, r: int, halfinteger: bool = False) -> StokesLink:
    """Closure of the (n, 2r) torus braid, or (n, r) for the half-integer type."""
    if n < 1 or r < 1:
        raise ValueError("n >= 1 and r >= 1")
    k = r if halfinteger else 2 * r
    word = torus_braid_word(n, k)
    perm = braid_permutation(n, word)
    comps = cycle_count(perm)
    if n == 1:
        name = "unknot"
    elif (n, k) == (2, 3):
        name = "trefoil"
    else:
        name = f"T({n},{k})"
    return StokesLink(n, k, word, perm, comps, name)


def torus_components_formula(n: int, k: int) -> int:
    return math.gcd(n, k)
