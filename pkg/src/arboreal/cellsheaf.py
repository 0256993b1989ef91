"""Cellular sheaves on the nerve of an arboreal singularity.

A sheaf is a functor on a poset: either the coarse poset of strata
(correspondences) or the fine face poset of the nerve.  Stalks are bounded
cochain complexes and each relation x <= y carries a generization chain map
stalk(x) -> stalk(y).  Sheaves built from the tree are defined on strata and
pulled back to simplices through the label (last element) of a chain.

Cohomology conventions:
  * closed region: cellular cochains, stalk(s) placed in degree dim s;
  * any other region: derived limit over the face poset of the region
    (cochains on flags s_0 < ... < s_m with values in stalk(s_m));
  * compact supports on an open U: cellular cochains on the simplices of U;
  * Verdier dual on the open part: D(F)_s is the linear dual of the compactly
    supported cochains of F on the open star of s, degrees negated, and
    generization is the dual of extension by zero.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .arbspace import Nerve, Region, Simplex, build_nerve
from .linalg import QQ, ChainMap, CochainComplex, Field, Matrix
from .quiverrep import PathAlgebra, ProjComplex, correspondence_functor, hh_map, hom_complex
from .treecat import Correspondence, RootedTree, Tree, rooted_quotient


class RegionError(ValueError):
    pass


class VerificationError(AssertionError):
    """A square that should commute does not (an implementation bug, not bad input)."""


# ---------------------------------------------------------------------------
# the sheaf object


class CellSheaf:
    def __init__(self, nerve: Nerve, kind: str, elements: Iterable,
                 stalk: Callable[[Hashable], CochainComplex],
                 gen: Callable[[Hashable, Hashable], ChainMap],
                 field: Field = QQ, name: str = ""):
        if kind not in ("coarse", "fine"):
            raise ValueError("kind is 'coarse' or 'fine'")
        self.nerve = nerve
        self.kind = kind
        self.elements = list(elements)
        self._elset = frozenset(self.elements)
        self._stalk_fn = stalk
        self._gen_fn = gen
        self.field = field
        self.name = name
        self._stalks: Dict = {}
        self._gens: Dict = {}

    def __contains__(self, x):
        return x in self._elset

    def less_eq(self, x, y) -> bool:
        if self.kind == "coarse":
            return self.nerve.less_eq(x, y)
        return set(x) <= set(y)

    def stalk(self, x) -> CochainComplex:
        if x not in self._stalks:
            self._stalks[x] = self._stalk_fn(x)
        return self._stalks[x]

    def gen(self, x, y) -> ChainMap:
        if x == y:
            return ChainMap.identity(self.stalk(x))
        key = (x, y)
        if key not in self._gens:
            if not self.less_eq(x, y):
                raise ValueError(f"{x} is not below {y}")
            self._gens[key] = self._gen_fn(x, y)
        return self._gens[key]

    def covers(self) -> List[Tuple]:
        if self.kind == "coarse":
            return [(i, j) for i, j in self.nerve.covers() if i in self and j in self]
        out = []
        for s in self.elements:
            for _, f in Nerve.faces(s):
                if f in self:
                    out.append((f, s))
        return out

    def relations(self) -> List[Tuple]:
        """All strict relations x < y among the elements."""
        if self.kind == "coarse":
            return [(i, j) for i in self.elements for j in self.nerve.up[i] if j in self]
        out = []
        for s in self.elements:
            n = len(s)
            for mask in range(1, (1 << n) - 1):
                f = tuple(s[i] for i in range(n) if mask >> i & 1)
                if f in self:
                    out.append((f, s))
        return out

    def stalk_dims(self, x) -> Dict[int, int]:
        return self.stalk(x).cohomology_dims()

    def check_functorial(self) -> List[Tuple]:
        """Failures of gen(y,z) o gen(x,y) == gen(x,z) over composable covers and all relations."""
        bad = []
        for x, y in self.covers():
            if not self.gen(x, y).is_chain_map():
                bad.append(("not a chain map", x, y))
        up: Dict = {}
        for x, y in self.covers():
            up.setdefault(x, []).append(y)
        for x, ys in up.items():
            for y in ys:
                for z in up.get(y, []):
                    if self.gen(y, z).compose(self.gen(x, y)) != self.gen(x, z):
                        bad.append(("square", x, y, z))
        return bad

    def shift(self, k: int) -> "CellSheaf":
        def gen(x, y):
            g = self.gen(x, y)
            return ChainMap(self.stalk(x).shift(k), self.stalk(y).shift(k),
                            {i - k: m for i, m in g.comps.items()})
        return CellSheaf(self.nerve, self.kind, self.elements,
                         lambda x: self.stalk(x).shift(k), gen, self.field,
                         f"{self.name}[{k}]")

    def pullback(self, simplices: Optional[Iterable[Simplex]] = None) -> "CellSheaf":
        """Coarse sheaf -> sheaf on the face poset (constant along each stratum)."""
        if self.kind != "coarse":
            return self
        simps = self.nerve.simplices if simplices is None else simplices
        simps = [s for s in simps if s[-1] in self]
        return CellSheaf(self.nerve, "fine", simps,
                         lambda s: self.stalk(s[-1]),
                         lambda s, t: self._label_gen(s[-1], t[-1]),
                         self.field, self.name)

    def _label_gen(self, i, j):
        return self.gen(i, j)

    def restrict(self, simplices: Iterable[Simplex]) -> "CellSheaf":
        f = self.pullback()
        keep = [s for s in simplices if s in f]
        return CellSheaf(self.nerve, "fine", keep, f.stalk, f.gen, self.field, self.name)

    def single_degree_rep(self, degree: int) -> "PosetRep":
        """The degree-``degree`` part as a poset representation (zero differentials assumed)."""
        dims = {x: self.stalk(x).dim(degree) for x in self.elements}
        maps = {(x, y): self.gen(x, y).at(degree) for x, y in self.covers()}
        return PosetRep(self.elements, dims, maps, self.field)


def constant_sheaf(nerve: Nerve, kind: str = "coarse", elements=None, degree: int = 0,
                   field: Field = QQ) -> CellSheaf:
    if elements is None:
        elements = range(len(nerve.corrs)) if kind == "coarse" else nerve.simplices
    k = CochainComplex({degree: 1}, {}, field)
    one = {degree: Matrix.identity(1, field)}
    return CellSheaf(nerve, kind, elements, lambda x: k,
                     lambda x, y: ChainMap(k, k, one), field, "k")


def _zero_map(a: CochainComplex, b: CochainComplex) -> ChainMap:
    return ChainMap(a, b, {})


# ---------------------------------------------------------------------------
# poset representations and their Hom spaces


class PosetRep:
    """Vector spaces on elements with matrices on (cover) relations."""

    def __init__(self, elements, dims, maps, field: Field = QQ):
        self.elements = list(elements)
        self.dims = dict(dims)
        self.maps = dict(maps)
        self.field = field


def rep_hom_space(A: PosetRep, B: PosetRep, pairs: Optional[Sequence[Tuple]] = None) -> List[Dict]:
    """Basis of natural transformations A -> B on the given relations.

    phi_x is a dims_B[x] x dims_A[x] matrix; constraint phi_y A_xy = B_xy phi_x.
    """
    field = A.field
    pairs = list(A.maps) if pairs is None else pairs
    offs, o = {}, 0
    for x in A.elements:
        offs[x] = o
        o += B.dims[x] * A.dims[x]
    nvar = o

    def var(x, r, c):
        return offs[x] + r * A.dims[x] + c

    rows = []
    for x, y in pairs:
        ax, ay, bx, by = A.dims[x], A.dims[y], B.dims[x], B.dims[y]
        if (ax == 0 or by == 0):
            continue
        Axy = A.maps[(x, y)].to_dense() if ay and ax else None
        Bxy = B.maps[(x, y)].to_dense() if by and bx else None
        for r in range(by):
            for c in range(ax):
                row = {}
                if Axy is not None:
                    for k in range(ay):
                        v = Axy[k][c]
                        if v:
                            key = var(y, r, k)
                            row[key] = row.get(key, 0) + v
                if Bxy is not None:
                    for k in range(bx):
                        v = Bxy[r][k]
                        if v:
                            key = var(x, k, c)
                            row[key] = row.get(key, 0) - v
                row = {k: field.reduce(v) for k, v in row.items() if field.reduce(v) != 0}
                if row:
                    rows.append(row)
    sysm = Matrix(len(rows), nvar, field, dict(enumerate(rows)))
    out = []
    for col in sysm.nullspace().columns():
        phi = {}
        for x in A.elements:
            ent = []
            for r in range(B.dims[x]):
                for c in range(A.dims[x]):
                    v = col.get(var(x, r, c))
                    if v:
                        ent.append((r, c, v))
            phi[x] = Matrix.from_entries(B.dims[x], A.dims[x], ent, field)
        out.append(phi)
    return out


def _generic_combination(basis: List[Dict], seed: int, field: Field) -> Optional[Dict]:
    if not basis:
        return None
    if len(basis) == 1:
        return basis[0]
    rng = random.Random(seed)
    coeffs = [rng.randint(1, 97) for _ in basis]
    out = {}
    for x in basis[0]:
        m = basis[0][x].scale(coeffs[0])
        for c, b in zip(coeffs[1:], basis[1:]):
            m = m + b[x].scale(c)
        out[x] = m
    return out


@dataclass
class IsoCertificate:
    hom_dim: int
    invertible: bool
    squares_commute: bool
    failures: List = dc_field(default_factory=list)

    @property
    def ok(self):
        return self.hom_dim >= 1 and self.invertible and self.squares_commute

    def to_json(self):
        return {"hom_dim": self.hom_dim, "invertible": self.invertible,
                "squares_commute": self.squares_commute, "ok": self.ok,
                "failures": [str(f) for f in self.failures[:20]]}


def iso_certificate(A: PosetRep, B: PosetRep, seed: int = 0) -> IsoCertificate:
    """Solve for all maps A -> B and test whether a generic one is invertible."""
    basis = rep_hom_space(A, B)
    phi = _generic_combination(basis, seed, A.field)
    if phi is None:
        return IsoCertificate(0, False, False, ["no nonzero morphism"])
    inv = all(A.dims[x] == B.dims[x] and (A.dims[x] == 0 or phi[x].is_invertible())
              for x in A.elements)
    return IsoCertificate(len(basis), inv, True)


def iso_certificate_from_minimum(A: PosetRep, B: PosetRep, m, full_maps_A, full_maps_B,
                                 seed: int = 0) -> IsoCertificate:
    """Iso certificate when A's maps out of the minimum m are all surjective.

    A morphism is then determined by phi_m, subject to phi_m killing each
    kernel of A(m -> x) after B(m -> x).  ``full_maps_*`` give the maps m -> x.
    """
    field = A.field
    am = A.dims[m]
    bm = B.dims[m]
    nvar = bm * am
    rows = []
    right_inv = {}
    for x in A.elements:
        if x == m:
            continue
        Amx, Bmx = full_maps_A[x], full_maps_B[x]
        if Amx.rank() != A.dims[x]:
            raise ValueError("map out of the minimum is not surjective")
        K = Amx.nullspace()
        right_inv[x] = Amx.solve(Matrix.identity(A.dims[x], field)) if A.dims[x] else None
        Bd = Bmx.to_dense()
        Kc = K.columns()
        # (Bmx phi K)[r][c] = sum_{i,j} Bmx[r][i] phi[i][j] K[j][c]
        for r in range(B.dims[x]):
            for kc in Kc:
                row = {}
                for i in range(bm):
                    bv = Bd[r][i]
                    if not bv:
                        continue
                    for j, kv in kc.items():
                        key = i * am + j
                        row[key] = row.get(key, 0) + bv * kv
                row = {k: field.reduce(v) for k, v in row.items() if field.reduce(v) != 0}
                if row:
                    rows.append(row)
    sysm = Matrix(len(rows), nvar, field, dict(enumerate(rows)))
    ns = sysm.nullspace().columns()
    basis = [{m: Matrix.from_entries(bm, am, ((k // am, k % am, v) for k, v in col.items()), field)}
             for col in ns]
    phi0 = _generic_combination(basis, seed, field)
    if phi0 is None:
        return IsoCertificate(0, False, False, ["no nonzero morphism"])
    pm = phi0[m]
    phi = {m: pm}
    for x in A.elements:
        if x != m:
            phi[x] = (full_maps_B[x] @ pm @ right_inv[x]) if A.dims[x] else Matrix(B.dims[x], 0, field)
    inv = all(A.dims[x] == B.dims[x] and (A.dims[x] == 0 or phi[x].is_invertible())
              for x in A.elements)
    fails = []
    for (x, y), a in A.maps.items():
        if phi[y] @ a != B.maps[(x, y)] @ phi[x]:
            fails.append((x, y))
    return IsoCertificate(len(basis), inv, not fails, fails)


# ---------------------------------------------------------------------------
# cochain models


def cellular_complex(F: CellSheaf, simplices: Iterable[Simplex]) -> Tuple[CochainComplex, Dict[int, List]]:
    """Cellular cochains of F over a set of simplices (cofaces outside are dropped)."""
    F = F.pullback()
    simps = sorted((s for s in simplices if s in F), key=lambda c: (len(c), c))
    inside = set(simps)
    basis: Dict[int, List] = {}
    for s in simps:
        st = F.stalk(s)
        for i in sorted(st.dims):
            for k in range(st.dim(i)):
                basis.setdefault(len(s) - 1 + i, []).append((s, i, k))
    pos = {n: {b: r for r, b in enumerate(bs)} for n, bs in basis.items()}
    cof = F.nerve.cofaces
    ents: Dict[int, list] = {}
    for s in simps:
        st = F.stalk(s)
        ds = len(s) - 1
        sgn_int = -1 if ds % 2 else 1
        for i in st.dims:
            n = ds + i
            tgt = pos.get(n + 1, {})
            for sign, t in cof[s]:
                if t not in inside:
                    continue
                g = F.gen(s, t).at(i)
                for r, row in g.rows.items():
                    for k, v in row.items():
                        ents.setdefault(n, []).append((tgt[(t, i, r)], pos[n][(s, i, k)], sign * v))
            dm = st.d(i)
            for r, row in dm.rows.items():
                for k, v in row.items():
                    ents.setdefault(n, []).append((tgt[(s, i + 1, r)], pos[n][(s, i, k)], sgn_int * v))
    dims = {n: len(bs) for n, bs in basis.items()}
    diff = {n: Matrix.from_entries(dims.get(n + 1, 0), dims[n], e, F.field) for n, e in ents.items()}
    return CochainComplex(dims, diff, F.field), basis


def _flags(nerve: Nerve, simps: Sequence[Simplex]) -> List[Tuple[Simplex, ...]]:
    inside = set(simps)
    above = {s: [t for t in nerve.star(s) if t != s and t in inside] for s in simps}
    flags = []
    stack = [(s,) for s in simps]
    while stack:
        c = stack.pop()
        flags.append(c)
        for t in above[c[-1]]:
            stack.append(c + (t,))
    flags.sort(key=lambda c: (len(c), c))
    return flags


def derived_limit_complex(F: CellSheaf, simplices: Iterable[Simplex]) -> CochainComplex:
    """Cochains computing H^*(region, F) from the face poset of the region."""
    F = F.pullback()
    simps = sorted((s for s in simplices if s in F), key=lambda c: (len(c), c))
    flags = _flags(F.nerve, simps)
    basis: Dict[int, List] = {}
    for c in flags:
        st = F.stalk(c[-1])
        for i in sorted(st.dims):
            for k in range(st.dim(i)):
                basis.setdefault(len(c) - 1 + i, []).append((c, i, k))
    pos = {n: {b: r for r, b in enumerate(bs)} for n, bs in basis.items()}
    ents: Dict[int, list] = {}
    for c2 in flags:
        if len(c2) < 2:
            continue
        m1 = len(c2) - 1
        st2 = F.stalk(c2[-1])
        for a in range(m1):
            face = c2[:a] + c2[a + 1:]
            sg = -1 if a % 2 else 1
            for i in st2.dims:
                n = len(face) - 1 + i
                for k in range(st2.dim(i)):
                    ents.setdefault(n, []).append((pos[n + 1][(c2, i, k)], pos[n][(face, i, k)], sg))
        face = c2[:-1]
        sg = -1 if m1 % 2 else 1
        st1 = F.stalk(face[-1])
        for i in st1.dims:
            n = len(face) - 1 + i
            g = F.gen(face[-1], c2[-1]).at(i)
            for r, row in g.rows.items():
                for k, v in row.items():
                    ents.setdefault(n, []).append((pos[n + 1][(c2, i, r)], pos[n][(face, i, k)], sg * v))
    for c in flags:
        st = F.stalk(c[-1])
        m = len(c) - 1
        sg = -1 if m % 2 else 1
        for i in st.dims:
            n = m + i
            for r, row in st.d(i).rows.items():
                for k, v in row.items():
                    ents.setdefault(n, []).append((pos[n + 1][(c, i + 1, r)], pos[n][(c, i, k)], sg * v))
    dims = {n: len(bs) for n, bs in basis.items()}
    diff = {n: Matrix.from_entries(dims.get(n + 1, 0), dims[n], e, F.field) for n, e in ents.items()}
    return CochainComplex(dims, diff, F.field)


def _simplices_of(region, nerve: Nerve) -> List[Simplex]:
    if region is None:
        return list(nerve.simplices)
    if isinstance(region, Region):
        return list(region.simplices)
    return list(region)


def cohomology(F: CellSheaf, region=None, method: str = "auto") -> Dict[int, int]:
    """H^*(region, F); cellular cochains when the region is closed, derived limit otherwise."""
    simps = _simplices_of(region, F.nerve)
    reg = Region(F.nerve, frozenset(simps))
    if method == "auto":
        method = "cellular" if reg.is_closed() else "derived"
    if method == "cellular":
        if not reg.is_closed():
            raise RegionError("cellular cochains compute H^* only on closed regions")
        return cellular_complex(F, simps)[0].cohomology_dims()
    if method == "derived":
        return derived_limit_complex(F, simps).cohomology_dims()
    raise ValueError(f"unknown method {method!r}")


def compact_cohomology(F: CellSheaf, U) -> Dict[int, int]:
    simps = _simplices_of(U, F.nerve)
    if not Region(F.nerve, frozenset(simps)).is_open():
        raise RegionError("compactly supported cohomology needs an open region")
    return cellular_complex(F, simps)[0].cohomology_dims()


def verdier_dual(F: CellSheaf, region=None) -> CellSheaf:
    """D(F) on an open region (default: the open part), built from open stars."""
    nerve = F.nerve
    simps = _simplices_of(region if region is not None else nerve.open_part(), nerve)
    if not Region(nerve, frozenset(simps)).is_open():
        raise RegionError("Verdier dual is taken on an open region")
    Ff = F.restrict(simps)
    cache: Dict = {}

    def local(s):
        if s not in cache:
            cx, basis = cellular_complex(Ff, nerve.star(s))
            cache[s] = (cx, basis)
        return cache[s]

    def stalk(s):
        return local(s)[0].dual()

    def gen(s, t):
        _, bs = local(s)
        _, bt = local(t)
        comps = {}
        for n, lst in bs.items():
            tpos = {b: r for r, b in enumerate(bt.get(n, []))}
            ent = [(tpos[b], c, 1) for c, b in enumerate(lst) if b in tpos]
            comps[-n] = Matrix.from_entries(len(bt.get(n, [])), len(lst), ent, F.field)
        return ChainMap(stalk(s), stalk(t), comps)

    return CellSheaf(nerve, "fine", [s for s in simps if s in Ff], stalk, gen, F.field, f"D({F.name})")


# ---------------------------------------------------------------------------
# sheaves built from the tree


class NadlerSheaf:
    """Generating data of the sheaf of categories: quivers on strata and correspondence functors."""

    def __init__(self, rt: RootedTree, nerve: Optional[Nerve] = None, field: Field = QQ):
        self.rooted = rt
        self.root = rt.root
        self.nerve = nerve if nerve is not None else build_nerve(rt.tree)
        self.field = field
        self._quivers: Dict[int, RootedTree] = {}

    def quiver(self, p: int) -> RootedTree:
        if p not in self._quivers:
            self._quivers[p] = rooted_quotient(self.nerve.corrs[p], self.root)
        return self._quivers[p]

    def stalk_category(self, p: int) -> PathAlgebra:
        return PathAlgebra(self.quiver(p))

    def global_sections(self) -> RootedTree:
        return self.quiver(self.nerve.p0)

    def functor(self, p: int, X: ProjComplex) -> ProjComplex:
        return correspondence_functor(self.nerve.corrs[p], X, self.root)

    def generization(self, i: int, j: int, X: ProjComplex) -> ProjComplex:
        """c_q on a complex over R_i, landing in the labels of R_j."""
        tr = self.nerve.transfer(i, j)
        keep = {d: [k for k, a in enumerate(t) if a in tr] for d, t in X.terms.items()}
        terms = {d: tuple(tr[X.terms[d][k]] for k in ks) for d, ks in keep.items()}
        diff = {d: m.submatrix(keep.get(d + 1, []), keep.get(d, [])) for d, m in X.diff.items()}
        return ProjComplex(self.quiver(j), terms, diff, X.field)


def nadler_sheaf(rt: RootedTree, nerve: Optional[Nerve] = None, field: Field = QQ) -> NadlerSheaf:
    return NadlerSheaf(rt, nerve, field)


def hom_sheaf(N: NadlerSheaf, A: ProjComplex, B: ProjComplex) -> CellSheaf:
    """p -> Hom(c_p A, c_p B), generization = the functor on Hom bases."""
    nerve = N.nerve
    field = N.field
    root_q = N.rooted
    if A.quiver != root_q or B.quiver != root_q:
        raise ValueError("complexes must live on the sheaf's rooted tree")
    data: Dict[int, tuple] = {}

    def survivors(X, p):
        S = nerve.corrs[p].subtree
        return {d: [k for k, a in enumerate(t) if a in S] for d, t in X.terms.items()}

    def local(p):
        if p not in data:
            cx, basis = hom_complex(N.functor(p, A), N.functor(p, B))
            data[p] = (cx, basis, survivors(A, p), survivors(B, p))
        return data[p]

    def gen(i, j):
        cxi, bi, ai, bbi = local(i)
        cxj, bj, aj, bbj = local(j)
        comps = {}
        for n, lst in bi.items():
            tpos = {b: r for r, b in enumerate(bj.get(n, []))}
            ent = []
            for c, (d, jy, kx) in enumerate(lst):
                oy = bbi[d + n][jy]
                ox = ai[d][kx]
                if oy in bbj.get(d + n, []) and ox in aj.get(d, []):
                    b2 = (d, bbj[d + n].index(oy), aj[d].index(ox))
                    ent.append((tpos[b2], c, 1))
            comps[n] = Matrix.from_entries(len(bj.get(n, [])), len(lst), ent, field)
        return ChainMap(cxi, cxj, comps)

    return CellSheaf(nerve, "coarse", range(len(nerve.corrs)), lambda p: local(p)[0], gen,
                     field, "Hom")


def _vertex_basis_map(nerve: Nerve, i: int, j: int, field: Field) -> Matrix:
    """e_g -> e_{q(g)} when g survives the witness, else 0; sorted vertex bases."""
    ri = nerve.corrs[i].quotient_image.vertices
    rj = nerve.corrs[j].quotient_image.vertices
    tr = nerve.transfer(i, j)
    rpos = {v: r for r, v in enumerate(rj)}
    return Matrix.from_entries(len(rj), len(ri),
                               ((rpos[tr[g]], c, 1) for c, g in enumerate(ri) if g in tr), field)


def hh_sheaf(N: NadlerSheaf) -> CellSheaf:
    """p -> HH_0(k[R_p]) = k^{|R_p|} in degree 0 with the induced maps of Hochschild homology."""
    nerve, field = N.nerve, N.field

    def stalk(p):
        return CochainComplex({0: len(nerve.corrs[p])}, {}, field)

    def gen(i, j):
        q = nerve.witness(i, j)
        m = hh_map(q)  # rows: q's image vertices in its own labels
        tr = nerve.transfer(i, j)
        ri = nerve.corrs[i].quotient_image.vertices
        # q's image label of g -> R_j label of g
        relabel = {q.quotient[g]: tr[g] for g in ri if g in tr}
        qv = q.quotient_image.vertices
        rj = nerve.corrs[j].quotient_image.vertices
        rpos = {v: r for r, v in enumerate(rj)}
        perm = Matrix.from_entries(len(rj), len(qv), ((rpos[relabel[v]], c, 1) for c, v in enumerate(qv)), field)
        mm = Matrix(m.nrows, m.ncols, field, m.rows)
        return ChainMap(stalk(i), stalk(j), {0: perm @ mm})

    return CellSheaf(nerve, "coarse", range(len(nerve.corrs)), stalk, gen, field, "HH")


def dualizing_complex(T, sign: int = 1, nerve: Optional[Nerve] = None, field: Field = QQ) -> CellSheaf:
    """Closed form: k^{|R|} in degree -(|T|-1), one summand per disc through the stratum.

    Generization along the witness q adds the factors that q merges and drops
    those outside its middle.  ``sign`` orients the reference disc; it scales
    every distinguished basis vector and so does not change the maps.
    """
    if sign not in (1, -1):
        raise ValueError("orientation sign is +1 or -1")
    tree = T.tree if isinstance(T, RootedTree) else T
    nerve = nerve if nerve is not None else build_nerve(tree)
    deg = -(len(tree) - 1)

    def stalk(p):
        return CochainComplex({deg: len(nerve.corrs[p])}, {}, field)

    def gen(i, j):
        return ChainMap(stalk(i), stalk(j), {deg: _vertex_basis_map(nerve, i, j, field)})

    sh = CellSheaf(nerve, "coarse", range(len(nerve.corrs)), stalk, gen, field, "omega")
    sh.orientation_sign = sign
    return sh


@dataclass
class OmegaComparison:
    tree: str
    stalks_match: bool
    concentrated: bool
    ranks_match: bool
    certificate: IsoCertificate
    mismatches: List = dc_field(default_factory=list)

    @property
    def ok(self):
        return self.stalks_match and self.concentrated and self.ranks_match and self.certificate.ok

    def to_json(self):
        return {"tree": self.tree, "stalks_match": self.stalks_match, "concentrated": self.concentrated,
                "ranks_match": self.ranks_match, "certificate": self.certificate.to_json(),
                "ok": self.ok, "mismatches": [str(m) for m in self.mismatches[:20]]}


def dualizing_oracle(nerve: Nerve, field: Field = QQ) -> Tuple[CellSheaf, PosetRep, Dict]:
    """D(k) on the open part, its bottom-degree cohomology as a representation.

    Returns the dual sheaf, the representation on covers of the face poset,
    and the maps out of the minimum simplex (p0,).
    """
    d = len(nerve.tree) - 1
    opens = sorted(nerve.open_simplices, key=lambda c: (len(c), c))
    k = constant_sheaf(nerve, "fine", opens, 0, field)
    D = verdier_dual(k, opens)
    cyc = {s: D.stalk(s).cocycles(-d) for s in opens}

    def induced(s, t):
        img = D.gen(s, t).at(-d) @ cyc[s]
        sol = cyc[t].solve(img)
        if sol is None:
            raise VerificationError("restriction does not preserve cycles")
        return sol

    dims = {s: cyc[s].ncols for s in opens}
    maps = {(s, t): induced(s, t) for s, t in D.covers()}
    m = (nerve.p0,)
    from_min = {s: induced(m, s) for s in opens if s != m}
    return D, PosetRep(opens, dims, maps, field), from_min


def compare_dualizing(T: Tree, field: Field = QQ, nerve: Optional[Nerve] = None) -> OmegaComparison:
    """Closed-form omega against D(k) on the open part, stalkwise and as representations."""
    nerve = nerve if nerve is not None else build_nerve(T)
    d = len(T) - 1
    D, orep, from_min = dualizing_oracle(nerve, field)
    omega = dualizing_complex(T, 1, nerve, field).pullback(D.elements)
    crep = omega.single_degree_rep(-d)
    mism = []
    conc = True
    for s in D.elements:
        h = D.stalk_dims(s)
        if set(h) - {-d}:
            conc = False
            mism.append(("not concentrated", s, h))
        if h.get(-d, 0) != len(nerve.corrs[s[-1]]):
            mism.append(("stalk", s, h, len(nerve.corrs[s[-1]])))
    stalks_ok = not any(m[0] == "stalk" for m in mism)
    ranks_ok = True
    for key, a in crep.maps.items():
        if a.rank() != orep.maps[key].rank():
            ranks_ok = False
            mism.append(("rank", key))
    m = (nerve.p0,)
    c_from_min = {s: omega.gen(m, s).at(-d) for s in D.elements if s != m}
    cert = iso_certificate_from_minimum(crep, orep, m, c_from_min, from_min)
    return OmegaComparison(_tree_name(T), stalks_ok, conc, ranks_ok, cert, mism)


def _tree_name(T) -> str:
    from .treecat import to_compact
    if isinstance(T, RootedTree):
        return to_compact(T)
    return ",".join(T.vertices) + ";" + ",".join("".join(e) for e in T.sorted_edges)


# ---------------------------------------------------------------------------
# the canonical orientation


class SheafMorphism:
    def __init__(self, source: CellSheaf, target: CellSheaf, comps: Callable[[Hashable], ChainMap]):
        self.source = source
        self.target = target
        self._comps = comps
        self._cache: Dict = {}

    def at(self, x) -> ChainMap:
        if x not in self._cache:
            self._cache[x] = self._comps(x)
        return self._cache[x]

    def square_failures(self, relations: Optional[Sequence[Tuple]] = None) -> List[Tuple]:
        rels = self.source.relations() if relations is None else relations
        bad = []
        for x, y in rels:
            lhs = self.at(y).compose(self.source.gen(x, y))
            rhs = self.target.gen(x, y).compose(self.at(x))
            if lhs != rhs:
                bad.append((x, y))
        return bad

    def is_stalkwise_iso(self) -> bool:
        for x in self.source.elements:
            f = self.at(x)
            for i in set(self.source.stalk(x).dims) | set(self.target.stalk(x).dims):
                if not f.at(i).is_invertible():
                    return False
        return True


def canonical_orientation(N: NadlerSheaf, sign: int = 1) -> SheafMorphism:
    """HH -> omega[1 - |T|], |g><g| -> sign * (unit in the summand of g)."""
    n = len(N.rooted)
    H = hh_sheaf(N)
    W = dualizing_complex(N.rooted, sign, N.nerve, N.field).shift(1 - n)
    field = N.field

    def comp(p):
        r = len(N.nerve.corrs[p])
        return ChainMap(H.stalk(p), W.stalk(p), {0: Matrix.identity(r, field).scale(sign)})

    return SheafMorphism(H, W, comp)


@dataclass
class OrientationReport:
    tree: str
    sign: int
    stalkwise_iso: bool
    squares_commute: bool
    end_dim: int
    failures: List = dc_field(default_factory=list)

    @property
    def ok(self):
        return self.stalkwise_iso and self.squares_commute and self.end_dim == 1

    def to_json(self):
        return {"tree": self.tree, "sign": self.sign, "stalkwise_iso": self.stalkwise_iso,
                "squares_commute": self.squares_commute, "end_omega_dim": self.end_dim,
                "ok": self.ok, "failures": [str(f) for f in self.failures[:20]]}


def omega_endomorphisms(omega: CellSheaf) -> int:
    """dim of sheaf endomorphisms of omega, all commuting squares on the stratum poset."""
    d = min(min(omega.stalk(p).dims) for p in omega.elements if omega.stalk(p).dims)
    rep = omega.single_degree_rep(d)
    return len(rep_hom_space(rep, rep))


def verify_orientation(rt: RootedTree, sign: int = 1, field: Field = QQ,
                       nerve: Optional[Nerve] = None) -> OrientationReport:
    N = nadler_sheaf(rt, nerve, field)
    phi = canonical_orientation(N, sign)
    fails = phi.square_failures()
    iso = phi.is_stalkwise_iso()
    omega = dualizing_complex(rt, sign, N.nerve, field)
    e = omega_endomorphisms(omega)
    return OrientationReport(_tree_name(rt), sign, iso, not fails, e, fails)


# ---------------------------------------------------------------------------
# nondegeneracy


def hh0_class(A: PathAlgebra, x: int, field: Field = QQ) -> Dict[str, object]:
    """Class of a basis path in HH_0 = A/[A,A], in the idempotent basis."""
    n = A.dim
    comm = []
    for i in range(n):
        for j in range(n):
            row = {}
            a, b = A.prod[i][j], A.prod[j][i]
            if a is not None:
                row[a] = row.get(a, 0) + 1
            if b is not None:
                row[b] = row.get(b, 0) - 1
            row = {k: v for k, v in row.items() if v}
            if row:
                comm.append(row)
    idem = [A.idempotent[v] for v in A.vertices]
    # express x = sum c_v e_v + commutator; solve in the span of commutators and idempotents
    cols = [dict(r) for r in comm] + [{e: 1} for e in idem]
    M = Matrix.from_columns(cols, n, field)
    rhs = Matrix.from_entries(n, 1, [(x, 0, 1)], field)
    sol = M.solve(rhs)
    if sol is None:
        raise VerificationError("HH_0 is not spanned by idempotents")
    off = len(comm)
    return {v: sol[off + k, 0] for k, v in enumerate(A.vertices) if sol[off + k, 0] != 0}


@dataclass
class PairingReport:
    tree: str
    sign: int
    stalk_dims: Dict = dc_field(default_factory=dict)
    duality_ok: Dict = dc_field(default_factory=dict)
    trace_nonzero: Dict = dc_field(default_factory=dict)
    squares: Dict = dc_field(default_factory=dict)
    pmax: Dict = dc_field(default_factory=dict)
    failures: List = dc_field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return (all(self.duality_ok.values()) and all(self.trace_nonzero.values())
                and all(self.squares.values()) and all(self.pmax.values()))

    def to_json(self):
        return {
            "tree": self.tree, "sign": self.sign, "verdict": "pass" if self.verdict else "fail",
            "pairs": {k: {"stalk_dims": self.stalk_dims.get(k),
                          "duality_ok": self.duality_ok.get(k),
                          "trace_nonzero": self.trace_nonzero.get(k),
                          "squares_commute": self.squares.get(k),
                          "pmax_ok": self.pmax.get(k)}
                      for k in sorted(self.duality_ok)},
            "failures": [str(f) for f in self.failures[:50]],
        }


def _geodesic_correspondence(T: Tree, a: str, b: str) -> Correspondence:
    path = T.path(a, b)
    return Correspondence(T, frozenset(path), frozenset(T.induced_edges(path)))


def verify_nondegeneracy(rt: RootedTree, sign: int = 1, field: Field = QQ,
                         nerve: Optional[Nerve] = None) -> PairingReport:
    N = nadler_sheaf(rt, nerve, field)
    nerve = N.nerve
    d = len(rt) - 1
    opens = sorted(nerve.open_simplices, key=lambda c: (len(c), c))
    stars = {s: nerve.star(s) for s in opens}
    phi = canonical_orientation(N, sign)
    H = phi.source
    rep = PairingReport(_tree_name(rt), sign)
    proj = {a: ProjComplex.projective(rt, a, 0, field) for a in rt.vertices}
    homs = {}
    for a in rt.vertices:
        for b in rt.vertices:
            homs[(a, b)] = hom_sheaf(N, proj[a], proj[b])
    algebras: Dict[int, PathAlgebra] = {}

    def hdim(S, p):
        return S.stalk_dims(p)

    for a in rt.vertices:
        for b in rt.vertices:
            key = f"{a},{b}"
            Hab, Hba = homs[(a, b)], homs[(b, a)]
            # (i) D(Hom(P_b, P_a))[-d] against Hom(P_a, P_b), simplex by simplex
            ok_i = True
            dims_tab = {}
            supp = [s for s in opens if Hba.stalk(s[-1]).dims]
            Ff = Hba.restrict(supp)
            for s in opens:
                star_supp = [t for t in stars[s] if t in Ff]
                hc = cellular_complex(Ff, star_supp)[0].cohomology_dims() if star_supp else {}
                lhs = {d - j: v for j, v in hc.items()}
                rhs = hdim(Hab, s[-1])
                lab = nerve.corrs[s[-1]].label()
                dims_tab.setdefault(lab, [rhs.get(0, 0), lhs.get(0, 0)])
                if lhs != rhs or set(rhs) - {0} or any(v > 1 for v in rhs.values()):
                    ok_i = False
                    rep.failures.append(("duality", key, s, lhs, rhs))
            rep.stalk_dims[key] = dims_tab
            rep.duality_ok[key] = ok_i
            # (ii) trace of composed basis morphisms where both sides are rank one
            ok_ii = True
            traces = {}
            for p in range(len(nerve.corrs)):
                if hdim(Hab, p) != {0: 1} or hdim(Hba, p) != {0: 1}:
                    continue
                t = _trace_class(N, p, a, b, algebras, field)
                traces[p] = t
                img = phi.at(p).at(0).apply(t)
                if not img:
                    ok_ii = False
                    rep.failures.append(("trace", key, p))
            rep.trace_nonzero[key] = ok_ii
            ok_sq = True
            for i in traces:
                for j in nerve.up[i]:
                    if j in traces:
                        pushed = H.gen(i, j).at(0).apply(traces[i])
                        if pushed != traces[j]:
                            ok_sq = False
                            rep.failures.append(("trace square", key, i, j))
            rep.squares[key] = ok_sq
            # (iii) the maximal correspondence through the geodesic
            ok_iii = True
            if rt.leq(a, b):
                pm = nerve.index[_geodesic_correspondence(rt.tree, a, b)]
                g = Hab.gen(nerve.p0, pm).at(0)
                iso = g.shape == (1, 1) and g.rank() == 1
                t = _trace_class(N, pm, a, b, algebras, field)
                adj = phi.at(pm).at(0).apply(t)
                if not (iso and adj):
                    ok_iii = False
                    rep.failures.append(("pmax", key))
            rep.pmax[key] = ok_iii
    return rep


def _trace_class(N: NadlerSheaf, p: int, a: str, b: str, algebras, field) -> Dict[int, object]:
    """HH_0 class of g o f for the basis maps f: P_a -> P_b, g: P_b -> P_a at stratum p."""
    if p not in algebras:
        algebras[p] = PathAlgebra(N.quiver(p))
    A = algebras[p]
    q = N.nerve.corrs[p].quotient
    qa, qb = q[a], q[b]
    f = A.index[(qb, qa)]
    g = A.index[(qa, qb)]
    gf = A.prod[g][f]
    cls = hh0_class(A, gf, field)
    pos = {v: k for k, v in enumerate(A.vertices)}
    return {pos[v]: c for v, c in cls.items()}


# ---------------------------------------------------------------------------
# Euler characteristics from the strata


def euler_open_coarse(F: CellSheaf, U) -> int:
    """chi H^*(U, F) as sum_p chi(F_p) [chi(Zbar_p & U) - chi((Zbar_p - X_p) & U)].

    F is coarse.  X_p is the stratum p and Zbar_p its closure (labels <= p).
    Each term is the Euler characteristic of extension by zero from a
    locally closed stratum; the chi's are homotopy Euler characteristics.
    """
    nerve = F.nerve
    simps = frozenset(_simplices_of(U, nerve))
    labels = {s[-1] for s in simps}
    total = 0
    for p in labels:
        chi_f = F.stalk(p).euler()
        if not chi_f:
            continue
        closure = frozenset(s for s in simps if nerve.less_eq(s[-1], p))
        rest = frozenset(s for s in closure if s[-1] != p)
        total += chi_f * (Region(nerve, closure).euler() - Region(nerve, rest).euler())
    return total


def euler_compact_coarse(F: CellSheaf, U) -> int:
    """chi H_c^*(U, F) = sum_p chi(F_p) chi_c(X_p & U)."""
    nerve = F.nerve
    simps = _simplices_of(U, nerve)
    per: Dict[int, int] = {}
    for s in simps:
        per[s[-1]] = per.get(s[-1], 0) + (-1 if len(s) % 2 == 0 else 1)
    return sum(F.stalk(p).euler() * c for p, c in per.items())


def euler_of(dims: Dict[int, int]) -> int:
    return sum((-1) ** (i % 2) * v for i, v in dims.items())
