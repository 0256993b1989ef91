"""The arboreal singularity of a tree as the order complex of its correspondences.

Simplices are strictly increasing chains of correspondence indices; the index
order of ``Nerve.corrs`` is a linear extension of the poset, so a chain is just
an increasing tuple.  The stratum label of a chain is its last entry.
"""
from __future__ import annotations

from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .linalg import QQ, Field, Matrix
from .treecat import (Correspondence, RootedTree, Tree, TreeError, compose,
                      enumerate_correspondences, leq, rooted_quotient)

Simplex = Tuple[int, ...]


class Nerve:
    def __init__(self, T: Tree):
        self.tree = T
        self.corrs: List[Correspondence] = enumerate_correspondences(T)
        self.index: Dict[Correspondence, int] = {p: i for i, p in enumerate(self.corrs)}
        n = len(self.corrs)
        self._witness: Dict[Tuple[int, int], Correspondence] = {}
        up: List[List[int]] = [[] for _ in range(n)]
        for i, p in enumerate(self.corrs):
            for j in range(i + 1, n):
                ok, w = leq(p, self.corrs[j])
                if ok:
                    up[i].append(j)
                    self._witness[(i, j)] = w
        self.up = [tuple(u) for u in up]
        self.up_sets = [frozenset(u) for u in up]
        self.simplices: List[Simplex] = self._chains()
        self.simplex_index: Dict[Simplex, int] = {s: k for k, s in enumerate(self.simplices)}

    def _chains(self) -> List[Simplex]:
        out = []
        stack = [(i,) for i in range(len(self.corrs))]
        while stack:
            c = stack.pop()
            out.append(c)
            last_up = self.up[c[-1]]
            for j in last_up:
                stack.append(c + (j,))
        out.sort(key=lambda c: (len(c), c))
        return out

    # order
    def less_eq(self, i: int, j: int) -> bool:
        return i == j or j in self.up_sets[i]

    def witness(self, i: int, j: int) -> Correspondence:
        """The q with corrs[j] = q o corrs[i]."""
        if i == j:
            return Correspondence(self.corrs[i].quotient_image,
                                  frozenset(self.corrs[i].quotient_image.vertices))
        return self._witness[(i, j)]

    def transfer(self, i: int, j: int) -> Dict[str, str]:
        """Vertex map R_i -> R_j of the witness, in the labels of corrs[j].

        Vertices of R_i outside the witness's middle are absent.
        """
        key = (i, j)
        cache = self.__dict__.setdefault("_transfer", {})
        if key not in cache:
            pi, pj = self.corrs[i], self.corrs[j]
            out = {}
            for lab, g in pi.section.items():
                v = next(iter(g))
                if v in pj.subtree:
                    out[lab] = pj.quotient[v]
            cache[key] = out
        return cache[key]

    def covers(self) -> List[Tuple[int, int]]:
        """Cover relations i < j of the correspondence poset."""
        out = []
        for i, ups in enumerate(self.up_sets):
            for j in self.up[i]:
                if not any(j in self.up_sets[k] for k in self.up[i] if k != j):
                    out.append((i, j))
        return out

    @property
    def p0(self) -> int:
        return 0

    # simplices
    def dim(self, s: Simplex) -> int:
        return len(s) - 1

    def label(self, s: Simplex) -> int:
        return s[-1]

    def counts(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for s in self.simplices:
            out[len(s) - 1] = out.get(len(s) - 1, 0) + 1
        return out

    @staticmethod
    def faces(s: Simplex) -> List[Tuple[int, Simplex]]:
        """Codimension-one faces with incidence sign (-1)^i for deleting entry i."""
        if len(s) == 1:
            return []
        return [(-1 if i % 2 else 1, s[:i] + s[i + 1:]) for i in range(len(s))]

    @cached_property
    def cofaces(self) -> Dict[Simplex, List[Tuple[int, Simplex]]]:
        out: Dict[Simplex, List[Tuple[int, Simplex]]] = {s: [] for s in self.simplices}
        for t in self.simplices:
            for sign, f in self.faces(t):
                out[f].append((sign, t))
        return out

    def star(self, s: Simplex) -> List[Simplex]:
        """Open star: all simplices having s as a face (including s)."""
        seen = {s}
        todo = [s]
        while todo:
            x = todo.pop()
            for _, t in self.cofaces[x]:
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
        return sorted(seen, key=lambda c: (len(c), c))

    def closure(self, s: Simplex) -> List[Simplex]:
        out = set()
        n = len(s)
        for mask in range(1, 1 << n):
            out.add(tuple(s[i] for i in range(n) if mask >> i & 1))
        return sorted(out, key=lambda c: (len(c), c))

    def boundary_matrix(self, k: int, field: Field = QQ,
                        simplices: Optional[Sequence[Simplex]] = None) -> Matrix:
        """Simplicial boundary C_k -> C_{k-1} on the given (closed) set of simplices."""
        simps = self.simplices if simplices is None else simplices
        src = [s for s in simps if len(s) == k + 1]
        dst = [s for s in simps if len(s) == k]
        dpos = {s: i for i, s in enumerate(dst)}
        entries = []
        for j, s in enumerate(src):
            for sign, f in self.faces(s):
                if f in dpos:
                    entries.append((dpos[f], j, sign))
        return Matrix.from_entries(len(dst), len(src), entries, field)

    def check_boundary_squared(self, field: Field = QQ) -> bool:
        top = max(self.counts())
        for k in range(2, top + 1):
            if not (self.boundary_matrix(k - 1, field) @ self.boundary_matrix(k, field)).is_zero():
                return False
        return True

    # strata and regions
    def stratum(self, p: int) -> List[Simplex]:
        return [s for s in self.simplices if s[-1] == p]

    def stratum_dim(self, p: int) -> int:
        return len(self.tree) - len(self.corrs[p])

    @cached_property
    def open_simplices(self) -> FrozenSet[Simplex]:
        """The open arboreal singularity: chains starting at the trivial correspondence."""
        return frozenset(s for s in self.simplices if s[0] == self.p0)

    @cached_property
    def boundary_simplices(self) -> FrozenSet[Simplex]:
        return frozenset(s for s in self.simplices if s[0] != self.p0)

    def region(self, strata: Iterable[int]) -> "Region":
        strata = frozenset(strata)
        return Region(self, frozenset(s for s in self.simplices if s[-1] in strata), strata)

    def whole(self) -> "Region":
        return self.region(range(len(self.corrs)))

    def open_part(self) -> "Region":
        return Region(self, self.open_simplices)

    def boundary(self) -> "Region":
        return Region(self, self.boundary_simplices)

    def to_dot(self) -> str:
        lines = ["graph nerve {"]
        for i, p in enumerate(self.corrs):
            lines.append(f'  n{i} [label="{p.label()}"];')
        for s in self.simplices:
            if len(s) == 2:
                lines.append(f"  n{s[0]} -- n{s[1]};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_nerve(T: Tree) -> Nerve:
    return Nerve(T)


class Region:
    """A set of simplices of a nerve, optionally remembering the strata it came from."""

    def __init__(self, nerve: Nerve, simplices: FrozenSet[Simplex],
                 strata: Optional[FrozenSet[int]] = None):
        self.nerve = nerve
        self.simplices = frozenset(simplices)
        self.strata = strata

    def __contains__(self, s):
        return s in self.simplices

    def __len__(self):
        return len(self.simplices)

    def __iter__(self):
        return iter(sorted(self.simplices, key=lambda c: (len(c), c)))

    def __and__(self, other: "Region") -> "Region":
        st = None
        if self.strata is not None and other.strata is not None:
            st = self.strata & other.strata
        return Region(self.nerve, self.simplices & other.simplices, st)

    def __or__(self, other: "Region") -> "Region":
        st = None
        if self.strata is not None and other.strata is not None:
            st = self.strata | other.strata
        return Region(self.nerve, self.simplices | other.simplices, st)

    def __sub__(self, other: "Region") -> "Region":
        return Region(self.nerve, self.simplices - other.simplices)

    def __eq__(self, other):
        return isinstance(other, Region) and self.simplices == other.simplices

    def __hash__(self):
        return hash(self.simplices)

    def is_closed(self) -> bool:
        """Closed under taking faces."""
        return all(f in self.simplices for s in self.simplices for _, f in Nerve.faces(s))

    def is_open(self) -> bool:
        """Closed under taking cofaces."""
        cof = self.nerve.cofaces
        return all(t in self.simplices for s in self.simplices for _, t in cof[s])

    def labels(self) -> FrozenSet[int]:
        return frozenset(s[-1] for s in self.simplices)

    def counts(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for s in self.simplices:
            out[len(s) - 1] = out.get(len(s) - 1, 0) + 1
        return out

    def euler_c(self) -> int:
        """Alternating count of open simplices (compactly supported Euler characteristic)."""
        return sum(-1 if len(s) % 2 == 0 else 1 for s in self.simplices)

    def euler(self) -> int:
        """Euler characteristic of the order complex of the face poset of the region.

        Homotopy invariant, so it is the Euler characteristic of the region even
        when the region is not compact.  Uses e(s) = 1 - sum of e over faces of s
        in the region, the signed count of flags ending at s.
        """
        simps = sorted(self.simplices, key=len)
        e: Dict[Simplex, int] = {}
        for s in simps:
            n = len(s)
            acc = 1
            for mask in range(1, (1 << n) - 1):
                f = tuple(s[i] for i in range(n) if mask >> i & 1)
                if f in self.simplices:
                    acc -= e[f]
            e[s] = acc
        return sum(e.values())

    def face_poset_homology(self, field: Field = QQ) -> Dict[int, int]:
        """Homology of the order complex of the face poset restricted to the region.

        For a locally closed union of open simplices this order complex is a
        deformation retract of the region, so this is the homology of the
        underlying space.
        """
        simps = sorted(self.simplices, key=lambda c: (len(c), c))
        inside = set(simps)
        # strictly larger simplices of the region containing s
        above = {}
        for s in simps:
            above[s] = [t for t in self.nerve.star(s) if t != s and t in inside]
        flags: List[Tuple[Simplex, ...]] = []
        stack = [(s,) for s in simps]
        while stack:
            c = stack.pop()
            flags.append(c)
            for t in above[c[-1]]:
                stack.append(c + (t,))
        by_len: Dict[int, List[Tuple[Simplex, ...]]] = {}
        for f in flags:
            by_len.setdefault(len(f), []).append(f)
        index = {k: {f: i for i, f in enumerate(v)} for k, v in by_len.items()}
        rk = {}
        for k, fl in by_len.items():
            if k == 1:
                continue
            tgt = index[k - 1]
            entries = []
            for j, f in enumerate(fl):
                for i in range(k):
                    entries.append((tgt[f[:i] + f[i + 1:]], j, -1 if i % 2 else 1))
            rk[k - 1] = Matrix.from_entries(len(by_len[k - 1]), len(fl), entries, field).rank()
        out = {}
        for k, fl in by_len.items():
            d = k - 1
            h = len(fl) - rk.get(d, 0) - rk.get(d + 1, 0)
            if h:
                out[d] = h
        return out


def disc(nerve: Nerve, alpha: str) -> Region:
    """T(alpha): strata whose subtree contains alpha."""
    if alpha not in nerve.tree.vertices:
        raise TreeError(f"unknown vertex {alpha!r}")
    return nerve.region(i for i, p in enumerate(nerve.corrs) if alpha in p.subtree)


def hom_support(nerve: Nerve, root: str, alpha: str, beta: str) -> Region:
    """T(alpha, beta): alpha, beta in S and q(alpha) <= q(beta) in the induced rooted quotient."""
    for v in (alpha, beta):
        if v not in nerve.tree.vertices:
            raise TreeError(f"unknown vertex {v!r}")
    keep = []
    for i, p in enumerate(nerve.corrs):
        if alpha in p.subtree and beta in p.subtree:
            rq = rooted_quotient(p, root)
            if rq.leq(p.quotient[alpha], p.quotient[beta]):
                keep.append(i)
    return nerve.region(keep)


def mobius_from_p0(nerve: Nerve, p: int) -> int:
    """Alternating count of chains p0 < ... < p, by dimension."""
    return sum((-1) ** (len(s) - 1) for s in nerve.open_simplices if s[-1] == p)


def rooted_strata(nerve: Nerve, root: str) -> List[RootedTree]:
    return [rooted_quotient(p, root) for p in nerve.corrs]
