"""Path algebras of rooted trees, complexes of indecomposable projectives, and
the functors induced by tree correspondences.

Paths are read left to right: |a><b| is the path from a down to b (b on the
way from a to the root) and |a><b| |b><c| = |a><c|.  Right modules are quiver
representations; P_a = |a><a| k[T] is spanned by the paths leaving a.

Hom(P_x, P_y) is k |y><x| when y >= x and zero otherwise, so a map between
sums of projectives is just a scalar matrix whose nonzero entries sit at
legal positions.  Composition of such maps is matrix multiplication.
"""
from __future__ import annotations

import itertools
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from .linalg import QQ, ChainMap, CochainComplex, Field, Matrix
from .treecat import Correspondence, RootedTree, Tree, induced_roots, path_tree, rooted_quotient


class IllegalEntry(ValueError):
    """A matrix entry P_x -> P_y with y not >= x."""


class NotAChainMap(ValueError):
    pass


class PathAlgebra:
    def __init__(self, quiver: RootedTree):
        self.quiver = quiver
        self.basis: List[Tuple[str, str]] = quiver.comparable_pairs()
        self.index = {b: i for i, b in enumerate(self.basis)}
        self.vertices = list(quiver.vertices)
        self.idempotent = {v: self.index[(v, v)] for v in self.vertices}
        n = len(self.basis)
        prod = [[None] * n for _ in range(n)]
        for i, (a, b) in enumerate(self.basis):
            for j, (c, d) in enumerate(self.basis):
                if b == c:
                    prod[i][j] = self.index[(a, d)]
        self.prod = prod
        self.start = [a for a, _ in self.basis]
        self.end = [b for _, b in self.basis]

    @property
    def dim(self):
        return len(self.basis)

    def mul(self, i: int, j: int) -> Optional[int]:
        return self.prod[i][j]

    def name(self, i: int) -> str:
        a, b = self.basis[i]
        return f"|{a}><{b}|"

    def is_idempotent(self, i: int) -> bool:
        return self.start[i] == self.end[i]

    def projective_basis(self, a: str) -> List[int]:
        """Paths leaving a, i.e. the basis of P_a."""
        return [self.index[(a, b)] for b in self.quiver.ancestors(a)]

    def associative(self) -> bool:
        n = self.dim
        P = self.prod
        for i in range(n):
            for j in range(n):
                ij = P[i][j]
                for k in range(n):
                    jk = P[j][k]
                    lhs = None if ij is None else P[ij][k]
                    rhs = None if jk is None else P[i][jk]
                    if lhs != rhs:
                        return False
        return True


# ---------------------------------------------------------------------------
# explicit right modules (oracle side)


class RightModule:
    """A right module given by matrices: ``act[x] @ v`` is v . x for basis path x."""

    def __init__(self, algebra: PathAlgebra, dim: int, act: Sequence[Matrix], field: Field = QQ):
        self.algebra = algebra
        self.dim = dim
        self.act = list(act)
        self.field = field

    @classmethod
    def projective(cls, A: PathAlgebra, a: str, field: Field = QQ) -> "RightModule":
        basis = A.projective_basis(a)
        pos = {b: k for k, b in enumerate(basis)}
        act = []
        for x in range(A.dim):
            ent = []
            for k, v in enumerate(basis):
                w = A.prod[v][x]
                if w is not None:
                    ent.append((pos[w], k, 1))
            act.append(Matrix.from_entries(len(basis), len(basis), ent, field))
        return cls(A, len(basis), act, field)

    def is_module(self) -> bool:
        A = self.algebra
        for x in range(A.dim):
            for y in range(A.dim):
                xy = A.prod[x][y]
                lhs = self.act[y] @ self.act[x]
                rhs = self.act[xy] if xy is not None else Matrix(self.dim, self.dim, self.field)
                if lhs != rhs:
                    return False
        return True

    def dimension_vector(self) -> Dict[str, int]:
        A = self.algebra
        return {v: self.act[A.idempotent[v]].rank() for v in A.vertices}


def module_hom_dim(M: RightModule, N: RightModule) -> int:
    """dim Hom_A(M, N) by solving F . M_x = N_x . F for every basis path x."""
    field = M.field
    m, n = M.dim, N.dim
    if m == 0 or n == 0:
        return 0
    # unknown F[i][j] at column index i * m + j
    rows = []
    for x in range(M.algebra.dim):
        Mx, Nx = M.act[x], N.act[x]
        Mxd, Nxd = Mx.to_dense(), Nx.to_dense()
        for i in range(n):
            for j in range(m):
                row = {}
                # (F Mx)[i][j] = sum_k F[i][k] Mx[k][j]
                for k in range(m):
                    v = Mxd[k][j]
                    if v:
                        row[i * m + k] = row.get(i * m + k, 0) + v
                # (Nx F)[i][j] = sum_k Nx[i][k] F[k][j]
                for k in range(n):
                    v = Nxd[i][k]
                    if v:
                        row[k * m + j] = row.get(k * m + j, 0) - v
                row = {c: field.reduce(v) for c, v in row.items()}
                row = {c: v for c, v in row.items() if v != 0}
                if row:
                    rows.append(row)
    sysm = Matrix(len(rows), n * m, field, dict(enumerate(rows)))
    return n * m - sysm.rank()


def module_hom_basis(M: RightModule, N: RightModule) -> List[Matrix]:
    """A basis of Hom_A(M, N) as N.dim x M.dim matrices."""
    field = M.field
    m, n = M.dim, N.dim
    rows = []
    for x in range(M.algebra.dim):
        Mxd, Nxd = M.act[x].to_dense(), N.act[x].to_dense()
        for i in range(n):
            for j in range(m):
                row = {}
                for k in range(m):
                    if Mxd[k][j]:
                        row[i * m + k] = row.get(i * m + k, 0) + Mxd[k][j]
                for k in range(n):
                    if Nxd[i][k]:
                        row[k * m + j] = row.get(k * m + j, 0) - Nxd[i][k]
                row = {c: field.reduce(v) for c, v in row.items() if field.reduce(v) != 0}
                if row:
                    rows.append(row)
    sysm = Matrix(len(rows), n * m, field, dict(enumerate(rows)))
    ns = sysm.nullspace()
    out = []
    for col in ns.columns():
        out.append(Matrix.from_entries(n, m, ((k // m, k % m, v) for k, v in col.items()), field))
    return out


def pushforward_dimension_vector(p: Correspondence, root: str, alpha: str,
                                 field: Field = QQ) -> Dict[str, int]:
    """Dimension vector of c_p(P_alpha) computed as a bimodule tensor product.

    Forms P_alpha (tensor over k[T]) k[S], with k[S] the quotient of k[T] by the
    paths leaving S, and restricts along k[R] -> k[S], which sends a vertex of
    R to the lowest vertex of its class.  Everything is done on explicit
    matrices; nothing here uses the closed formula for c_p.
    """
    T = p.target
    AT = PathAlgebra(RootedTree(T, root))
    root_S, _ = induced_roots(p, root)
    AS = PathAlgebra(RootedTree(p.middle, root_S))
    M = RightModule.projective(AT, alpha, field)
    m, b = M.dim, AS.dim
    # left action of k[T] on k[S] through the quotient map
    def left(x, w):
        a, c = AT.basis[x]
        if a not in p.subtree or c not in p.subtree:
            return None
        return AS.prod[AS.index[(a, c)]][w]
    rel = []
    for v in range(m):
        for x in range(AT.dim):
            vx = M.act[x].rows  # column j of act[x] is v . x
            for w in range(b):
                row = {}
                for i, r in vx.items():
                    c = r.get(v)
                    if c:
                        row[i * b + w] = row.get(i * b + w, 0) + c
                xw = left(x, w)
                if xw is not None:
                    row[v * b + xw] = row.get(v * b + xw, 0) - 1
                row = {k: field.reduce(c) for k, c in row.items() if field.reduce(c) != 0}
                if row:
                    rel.append(row)
    relm = Matrix(len(rel), m * b, field, dict(enumerate(rel)))
    r0 = relm.rank()
    lowest = {}
    for g in p.classes:
        lowest[_class_name(g)] = min(g, key=lambda v: (RootedTree(T, root).depth[v], v))
    out = {}
    for lam, s in lowest.items():
        e = AS.idempotent[s]
        img = []
        for v in range(m):
            for w in range(b):
                we = AS.prod[w][e]
                if we is not None:
                    img.append({v * b + we: 1})
        both = Matrix(len(rel) + len(img), m * b, field,
                      dict(enumerate(rel + img)))
        out[lam] = both.rank() - r0
    return out


def _class_name(g):
    from .treecat import class_label
    return class_label(g)


def k0_class(dimvec: Dict[str, int], quiver: RootedTree, field: Field = QQ) -> Dict[str, int]:
    """Coefficients c with dimvec = sum_g c_g dim(P_g), solved exactly."""
    vs = list(quiver.vertices)
    # column g is the dimension vector of P_g: 1 at each vertex below g
    mat = Matrix.from_entries(len(vs), len(vs),
                              ((i, j, 1) for j, g in enumerate(vs)
                               for i, lam in enumerate(vs) if quiver.geq(g, lam)), field)
    rhs = Matrix.from_entries(len(vs), 1, ((i, 0, dimvec.get(v, 0)) for i, v in enumerate(vs)), field)
    sol = mat.solve(rhs)
    return {v: sol[i, 0] for i, v in enumerate(vs) if sol[i, 0] != 0}


# ---------------------------------------------------------------------------
# complexes of projectives


class ProjComplex:
    """Bounded complex of sums of projectives over a rooted tree quiver.

    ``terms[i]`` lists the vertex of each summand in degree i and ``diff[i]``
    is the scalar matrix of d: degree i -> degree i + 1, an entry at (j, k)
    standing for a multiple of |y_j><x_k|.
    """

    def __init__(self, quiver: RootedTree, terms: Dict[int, Sequence[str]],
                 diff: Optional[Dict[int, Matrix]] = None, field: Field = QQ, check: bool = True):
        self.quiver = quiver
        self.field = field
        self.terms = {i: tuple(t) for i, t in terms.items() if len(t)}
        self.diff = {}
        for i, m in (diff or {}).items():
            if m.shape != (len(self.term(i + 1)), len(self.term(i))):
                raise ValueError(f"differential {i} has shape {m.shape}")
            if not m.is_zero():
                self.diff[i] = m
        if check:
            self.validate()

    def term(self, i) -> Tuple[str, ...]:
        return self.terms.get(i, ())

    def d(self, i) -> Matrix:
        m = self.diff.get(i)
        if m is None:
            return Matrix(len(self.term(i + 1)), len(self.term(i)), self.field)
        return m

    def degrees(self):
        return sorted(self.terms)

    def validate(self):
        for v in (v for t in self.terms.values() for v in t):
            if v not in self.quiver.vertices:
                raise ValueError(f"unknown vertex {v!r}")
        for i, m in self.diff.items():
            src, tgt = self.term(i), self.term(i + 1)
            for j, r in m.rows.items():
                for k in r:
                    if not self.quiver.geq(tgt[j], src[k]):
                        raise IllegalEntry(f"degree {i}: no map P_{src[k]} -> P_{tgt[j]}")
        for i in self.diff:
            if not (self.d(i + 1) @ self.d(i)).is_zero():
                raise ValueError(f"d^2 != 0 at degree {i}")

    @classmethod
    def projective(cls, quiver: RootedTree, a: str, degree: int = 0, field: Field = QQ):
        return cls(quiver, {degree: (a,)}, {}, field)

    @classmethod
    def zero(cls, quiver: RootedTree, field: Field = QQ):
        return cls(quiver, {}, {}, field)

    def is_zero(self):
        return not self.terms

    def shift(self, k: int) -> "ProjComplex":
        s = -1 if k % 2 else 1
        return ProjComplex(self.quiver, {i - k: t for i, t in self.terms.items()},
                           {i - k: (m if s == 1 else -m) for i, m in self.diff.items()},
                           self.field, check=False)

    def at_vertex(self, v: str) -> Tuple[CochainComplex, Dict[int, List[int]]]:
        """The complex of vector spaces X e_v and, per degree, which summands survive."""
        keep = {i: [k for k, a in enumerate(t) if self.quiver.geq(a, v)] for i, t in self.terms.items()}
        dims = {i: len(ks) for i, ks in keep.items()}
        diff = {i: self.d(i).submatrix(keep.get(i + 1, []), keep.get(i, [])) for i in self.diff}
        return CochainComplex(dims, diff, self.field), keep

    def dimension_vector(self) -> Dict[str, int]:
        """Euler characteristic of X e_v at each vertex."""
        return {v: self.at_vertex(v)[0].euler() for v in self.quiver.vertices}

    def euler_class(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        for i, t in self.terms.items():
            for a in t:
                out[a] = out.get(a, 0) + (-1) ** (i % 2)
        return {a: c for a, c in out.items() if c}

    def to_json(self) -> dict:
        return {
            "terms": {str(i): list(t) for i, t in sorted(self.terms.items())},
            "differential": {
                str(i): [[j, k, str(v), [self.term(i + 1)[j], self.term(i)[k]]]
                         for j, r in sorted(m.rows.items()) for k, v in sorted(r.items())]
                for i, m in sorted(self.diff.items())},
        }

    def __repr__(self):
        return f"ProjComplex({ {i: ''.join(t) if all(len(x) == 1 for x in t) else t for i, t in sorted(self.terms.items())} })"


class ProjMap:
    """Chain map between ProjComplexes as legal scalar matrices per degree."""

    def __init__(self, source: ProjComplex, target: ProjComplex, comps: Dict[int, Matrix]):
        self.source = source
        self.target = target
        self.comps = {i: m for i, m in comps.items() if not m.is_zero()}
        for i, m in self.comps.items():
            if m.shape != (len(target.term(i)), len(source.term(i))):
                raise ValueError(f"component {i} has shape {m.shape}")
            for j, r in m.rows.items():
                for k in r:
                    if not source.quiver.geq(target.term(i)[j], source.term(i)[k]):
                        raise IllegalEntry(f"degree {i}: no map P_{source.term(i)[k]} -> P_{target.term(i)[j]}")

    def at(self, i) -> Matrix:
        m = self.comps.get(i)
        if m is None:
            return Matrix(len(self.target.term(i)), len(self.source.term(i)), self.source.field)
        return m

    def is_chain_map(self) -> bool:
        degs = set(self.source.terms) | set(self.target.terms)
        return all(self.target.d(i) @ self.at(i) == self.at(i + 1) @ self.source.d(i)
                   for i in degs | {i - 1 for i in degs})

    @classmethod
    def identity(cls, X: ProjComplex):
        return cls(X, X, {i: Matrix.identity(len(t), X.field) for i, t in X.terms.items()})


def cone(f: ProjMap) -> ProjComplex:
    """Cone(f)^i = X^{i+1} + Y^i with d = [[-d_X, 0], [f, d_Y]]."""
    if not f.is_chain_map():
        raise NotAChainMap("cone of a non-chain map")
    X, Y = f.source, f.target
    degs = {i - 1 for i in X.terms} | set(Y.terms)
    terms = {i: X.term(i + 1) + Y.term(i) for i in degs}
    diff = {}
    for i in degs:
        nx0, ny0 = len(X.term(i + 1)), len(Y.term(i))
        nx1, ny1 = len(X.term(i + 2)), len(Y.term(i + 1))
        ent = []
        for j, r in X.d(i + 1).rows.items():
            for k, v in r.items():
                ent.append((j, k, -v))
        for j, r in f.at(i + 1).rows.items():
            for k, v in r.items():
                ent.append((nx1 + j, k, v))
        for j, r in Y.d(i).rows.items():
            for k, v in r.items():
                ent.append((nx1 + j, nx0 + k, v))
        diff[i] = Matrix.from_entries(nx1 + ny1, nx0 + ny0, ent, X.field)
    return ProjComplex(X.quiver, terms, diff, X.field)


def hom_basis(X: ProjComplex, Y: ProjComplex) -> Dict[int, List[Tuple[int, int, int]]]:
    """Basis of Hom^n(X, Y): triples (i, j, k) meaning |y_j><x_k| from X^i to Y^{i+n}."""
    q = X.quiver
    out: Dict[int, List[Tuple[int, int, int]]] = {}
    for i, xs in X.terms.items():
        for n_deg in sorted({j - i for j in Y.terms}):
            ys = Y.term(i + n_deg)
            for j, y in enumerate(ys):
                for k, x in enumerate(xs):
                    if q.geq(y, x):
                        out.setdefault(n_deg, []).append((i, j, k))
    for n_deg in out:
        out[n_deg].sort()
    return out


def hom_complex(X: ProjComplex, Y: ProjComplex) -> Tuple[CochainComplex, Dict[int, List[Tuple[int, int, int]]]]:
    """Total Hom complex with D f = d_Y f - (-1)^n f d_X."""
    field = X.field
    basis = hom_basis(X, Y)
    pos = {n: {b: k for k, b in enumerate(bs)} for n, bs in basis.items()}
    diff = {}
    for n, bs in basis.items():
        tgt = pos.get(n + 1, {})
        sgn = -1 if n % 2 else 1
        ent = []
        for col, (i, j, k) in enumerate(bs):
            # d_Y o f: lands in Hom(X^i, Y^{i+n+1})
            dy = Y.d(i + n)
            for j2, r in dy.rows.items():
                v = r.get(j)
                if v:
                    ent.append((tgt[(i, j2, k)], col, v))
            # f o d_X: f restricted along d_X: X^{i-1} -> X^i
            dx = X.d(i - 1)
            r = dx.rows.get(k)
            if r:
                for k2, v in r.items():
                    ent.append((tgt[(i - 1, j, k2)], col, -sgn * v))
        if ent or (n + 1) in basis:
            diff[n] = Matrix.from_entries(len(basis.get(n + 1, [])), len(bs), ent, field)
    dims = {n: len(bs) for n, bs in basis.items()}
    return CochainComplex(dims, diff, field), basis


def hom_space(quiver: RootedTree, a: str, b: str) -> Optional[Tuple[str, str]]:
    """Hom(P_a, P_b): the basis path |b><a| when b >= a, else None."""
    return (b, a) if quiver.geq(b, a) else None


def correspondence_functor(p: Correspondence, X: ProjComplex, root: Optional[str] = None) -> ProjComplex:
    """c_p on a complex: drop summands outside S, relabel the rest by q."""
    root = root if root is not None else X.quiver.root
    if p.target != X.quiver.tree:
        raise ValueError("correspondence is not on this quiver's tree")
    rq = rooted_quotient(p, root)
    q = p.quotient
    keep = {i: [k for k, a in enumerate(t) if a in p.subtree] for i, t in X.terms.items()}
    terms = {i: tuple(q[X.terms[i][k]] for k in ks) for i, ks in keep.items()}
    diff = {i: m.submatrix(keep.get(i + 1, []), keep.get(i, [])) for i, m in X.diff.items()}
    return ProjComplex(rq, terms, diff, X.field)


def functor_on_hom(p: Correspondence, root: str, a: str, b: str) -> Optional[Tuple[str, str]]:
    """Image of the basis |b><a| of Hom(P_a, P_b) under c_p (None when it dies)."""
    if a not in p.subtree or b not in p.subtree:
        return None
    return (p.quotient[b], p.quotient[a])


def hh_map(p: Correspondence) -> Matrix:
    """HH_0(k[T]) -> HH_0(k[R]) in idempotent bases (columns T, rows R, sorted)."""
    tv = list(p.target.vertices)
    rv = list(p.quotient_image.vertices)
    rpos = {v: i for i, v in enumerate(rv)}
    q = p.quotient
    return Matrix.from_entries(len(rv), len(tv),
                               ((rpos[q[a]], j, 1) for j, a in enumerate(tv) if a in p.subtree))


def euler_form(quiver: RootedTree) -> Matrix:
    """chi Hom(P_a, P_b) on the projective basis (rows a, columns b)."""
    vs = list(quiver.vertices)
    return Matrix.from_entries(len(vs), len(vs),
                               ((i, j, 1) for i, a in enumerate(vs) for j, b in enumerate(vs)
                                if quiver.geq(b, a)))


def symmetrized_simple_form(quiver: RootedTree) -> Matrix:
    """Euler form moved to the basis of simples and symmetrized.

    [P_a] = sum of the simples below a, so with D the dimension-vector matrix
    the form on simples is D^{-T} E D^{-1}; its symmetrization only sees the
    underlying tree.
    """
    vs = list(quiver.vertices)
    n = len(vs)
    E = euler_form(quiver)
    D = Matrix.from_entries(n, n, ((i, j, 1) for j, g in enumerate(vs)
                                   for i, lam in enumerate(vs) if quiver.geq(g, lam)))
    Dinv = D.solve(Matrix.identity(n))
    S = Dinv.transpose() @ E @ Dinv
    return S + S.transpose()


# ---------------------------------------------------------------------------
# filtered complexes as complexes of projectives on the linear quiver


def linear_quiver(n: int) -> RootedTree:
    """0 -> 1 -> ... -> n with root n; representations are filtrations F_0 -> ... -> F_n."""
    labels = [str(i) for i in range(n + 1)]
    return RootedTree(path_tree(n + 1, labels), str(n))


class Filtration:
    """An object of Filt_n: a complex of projectives on the linear quiver."""

    def __init__(self, n: int, X: ProjComplex):
        if X.quiver != linear_quiver(n):
            raise ValueError("filtration must live on the linear quiver of length n")
        self.n = n
        self.complex = X

    def piece(self, j: int) -> CochainComplex:
        return self.complex.at_vertex(str(j))[0]

    def inclusion(self, j: int) -> ChainMap:
        """F_{j-1} -> F_j."""
        A, ka = self.complex.at_vertex(str(j - 1))
        B, kb = self.complex.at_vertex(str(j))
        comps = {}
        for i in set(ka) | set(kb):
            pos = {k: r for r, k in enumerate(kb.get(i, []))}
            comps[i] = Matrix.from_entries(len(kb.get(i, [])), len(ka.get(i, [])),
                                           ((pos[k], c, 1) for c, k in enumerate(ka.get(i, []))),
                                           self.complex.field)
        return ChainMap(A, B, comps)

    def associated_graded(self) -> Tuple[List[CochainComplex], CochainComplex]:
        """((F_0, Cone(F_0 -> F_1), ..., Cone(F_{n-1} -> F_n)), F_n)."""
        pieces = [self.piece(0)]
        for j in range(1, self.n + 1):
            pieces.append(mapping_cone(self.inclusion(j)))
        return pieces, self.piece(self.n)


def mapping_cone(f: ChainMap) -> CochainComplex:
    """Cone of a chain map of vector-space complexes."""
    if not f.is_chain_map():
        raise NotAChainMap("cone of a non-chain map")
    X, Y = f.source, f.target
    field = X.field
    degs = {i - 1 for i in X.dims} | set(Y.dims)
    dims = {i: X.dim(i + 1) + Y.dim(i) for i in degs}
    diff = {}
    for i in degs:
        nx0 = X.dim(i + 1)
        nx1 = X.dim(i + 2)
        ent = []
        for j, r in X.d(i + 1).rows.items():
            for k, v in r.items():
                ent.append((j, k, -v))
        for j, r in f.at(i + 1).rows.items():
            for k, v in r.items():
                ent.append((nx1 + j, k, v))
        for j, r in Y.d(i).rows.items():
            for k, v in r.items():
                ent.append((nx1 + j, nx0 + k, v))
        if i + 1 in dims or ent:
            diff[i] = Matrix.from_entries(dims.get(i + 1, 0), dims[i], ent, field)
    return CochainComplex(dims, diff, field)


def vector_hom_complex(X: CochainComplex, Y: CochainComplex) -> CochainComplex:
    """Hom complex of vector-space complexes, only its graded dimensions matter here."""
    dims: Dict[int, int] = {}
    for i, a in X.dims.items():
        for j, b in Y.dims.items():
            dims[j - i] = dims.get(j - i, 0) + a * b
    return CochainComplex(dims, {}, X.field)
