"""Trees, rooted trees and the poset of tree correspondences.

A correspondence R <<- S ->> T is stored in canonical form as the pair
(vertex set of the connected subtree S of T, set of edges of S that get
contracted).  R is then the set of connected components of S under the
contracted edges, so equality of correspondences is equality of that pair.
"""
from __future__ import annotations

import itertools
import json
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple


class TreeError(ValueError):
    pass


class CompositionError(ValueError):
    """Raised when the inner correspondence does not land on the outer target."""


Edge = FrozenSet[str]


def edge(a: str, b: str) -> Edge:
    return frozenset((a, b))


def edge_key(e: Edge) -> Tuple[str, str]:
    a, b = sorted(e)
    return (a, b)


@dataclass(frozen=True)
class Tree:
    vertices: Tuple[str, ...]
    edges: FrozenSet[Edge]

    def __init__(self, vertices: Iterable[str], edges: Iterable[Sequence[str]] = ()):
        verts = tuple(sorted(set(str(v) for v in vertices)))
        es = []
        for e in edges:
            e = tuple(str(x) for x in e)
            if len(e) != 2 or e[0] == e[1]:
                raise TreeError(f"bad edge {e!r}")
            es.append(frozenset(e))
        es_set = frozenset(es)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", es_set)
        self._validate(len(es))

    def _validate(self, n_listed):
        if not self.vertices:
            raise TreeError("a tree needs at least one vertex")
        vs = set(self.vertices)
        for e in self.edges:
            if not e <= vs:
                raise TreeError(f"edge {sorted(e)} has an unknown endpoint")
        if n_listed != len(self.edges):
            raise TreeError("repeated edge")
        if len(self.edges) != len(self.vertices) - 1:
            raise TreeError("edge count must be |V| - 1")
        if len(self._reach(self.vertices[0])) != len(self.vertices):
            raise TreeError("tree is not connected")

    def _reach(self, start):
        adj = self.adjacency
        seen = {start}
        todo = [start]
        while todo:
            v = todo.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return seen

    @cached_property
    def adjacency(self) -> Dict[str, Tuple[str, ...]]:
        adj: Dict[str, List[str]] = {v: [] for v in self.vertices}
        for e in self.edges:
            a, b = tuple(e)
            adj[a].append(b)
            adj[b].append(a)
        return {v: tuple(sorted(n)) for v, n in adj.items()}

    @cached_property
    def sorted_edges(self) -> Tuple[Tuple[str, str], ...]:
        return tuple(sorted(edge_key(e) for e in self.edges))

    def __len__(self):
        return len(self.vertices)

    def path(self, a: str, b: str) -> List[str]:
        """The unique vertex path from a to b."""
        prev = {a: None}
        todo = deque([a])
        while todo:
            v = todo.popleft()
            if v == b:
                break
            for w in self.adjacency[v]:
                if w not in prev:
                    prev[w] = v
                    todo.append(w)
        if b not in prev:
            raise TreeError(f"unknown vertex {b!r}")
        out = [b]
        while out[-1] != a:
            out.append(prev[out[-1]])
        return out[::-1]

    def induced_edges(self, vs: Iterable[str]) -> FrozenSet[Edge]:
        vs = set(vs)
        return frozenset(e for e in self.edges if e <= vs)

    def is_connected_subset(self, vs: Iterable[str]) -> bool:
        vs = set(vs)
        if not vs:
            return False
        start = next(iter(vs))
        seen = {start}
        todo = [start]
        while todo:
            v = todo.pop()
            for w in self.adjacency[v]:
                if w in vs and w not in seen:
                    seen.add(w)
                    todo.append(w)
        return seen == vs

    def subtree(self, vs: Iterable[str]) -> "Tree":
        vs = set(vs)
        return Tree(vs, [tuple(e) for e in self.induced_edges(vs)])

    def to_json(self, root: Optional[str] = None) -> dict:
        d = {"vertices": list(self.vertices), "edges": [list(e) for e in self.sorted_edges]}
        if root is not None:
            d["root"] = root
        return d

    def __repr__(self):
        es = ",".join(f"{a}-{b}" for a, b in self.sorted_edges)
        return f"Tree({','.join(self.vertices)}; {es})"


class RootedTree:
    """A tree with a root; every edge is directed toward the root.

    ``geq(a, b)`` holds when there is a directed path from a to b, i.e. b lies
    on the path from a to the root.  The root is the minimum.
    """

    def __init__(self, tree: Tree, root: str):
        if root not in tree.vertices:
            raise TreeError(f"root {root!r} is not a vertex")
        self.tree = tree
        self.root = root
        parent = {root: None}
        depth = {root: 0}
        todo = deque([root])
        while todo:
            v = todo.popleft()
            for w in tree.adjacency[v]:
                if w not in parent:
                    parent[w] = v
                    depth[w] = depth[v] + 1
                    todo.append(w)
        self.parent: Dict[str, Optional[str]] = parent
        self.depth: Dict[str, int] = depth

    @property
    def vertices(self):
        return self.tree.vertices

    def __len__(self):
        return len(self.tree)

    def __eq__(self, other):
        return isinstance(other, RootedTree) and self.tree == other.tree and self.root == other.root

    def __hash__(self):
        return hash((self.tree, self.root))

    def __repr__(self):
        return f"RootedTree({self.tree!r}, root={self.root})"

    def ancestors(self, a: str) -> List[str]:
        """a, parent(a), ..., root."""
        out = [a]
        while self.parent[out[-1]] is not None:
            out.append(self.parent[out[-1]])
        return out

    def geq(self, a: str, b: str) -> bool:
        if self.depth[a] < self.depth[b]:
            return False
        while self.depth[a] > self.depth[b]:
            a = self.parent[a]
        return a == b

    def leq(self, a: str, b: str) -> bool:
        return self.geq(b, a)

    def join(self, a: str, b: str) -> str:
        """Lowest point of the geodesic between a and b (closest to the root)."""
        while self.depth[a] > self.depth[b]:
            a = self.parent[a]
        while self.depth[b] > self.depth[a]:
            b = self.parent[b]
        while a != b:
            a, b = self.parent[a], self.parent[b]
        return a

    def comparable_pairs(self) -> List[Tuple[str, str]]:
        """All (a, b) with a >= b, i.e. the paths |a><b|, in canonical order."""
        return sorted((a, b) for a in self.vertices for b in self.ancestors(a))

    def arrows(self) -> List[Tuple[str, str]]:
        return sorted((v, p) for v, p in self.parent.items() if p is not None)

    def to_json(self):
        return self.tree.to_json(self.root)


@dataclass(frozen=True)
class Correspondence:
    """R <<- S ->> T in canonical form (subtree of T, contracted edges of S)."""

    target: Tree
    subtree: FrozenSet[str]
    contract: FrozenSet[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "subtree", frozenset(self.subtree))
        object.__setattr__(self, "contract", frozenset(frozenset(e) for e in self.contract))
        if not self.subtree or not self.subtree <= set(self.target.vertices):
            raise TreeError("subtree must be a nonempty set of target vertices")
        if not self.target.is_connected_subset(self.subtree):
            raise TreeError("subtree is not connected")
        if not self.contract <= self.target.induced_edges(self.subtree):
            raise TreeError("contracted edges must be edges of the subtree")

    @cached_property
    def middle(self) -> Tree:
        return self.target.subtree(self.subtree)

    @cached_property
    def classes(self) -> Tuple[FrozenSet[str], ...]:
        """Connected components of S under the contracted edges."""
        parent = {v: v for v in self.subtree}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for e in self.contract:
            a, b = tuple(e)
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        groups: Dict[str, set] = {}
        for v in self.subtree:
            groups.setdefault(find(v), set()).add(v)
        return tuple(sorted((frozenset(g) for g in groups.values()), key=lambda g: sorted(g)))

    @cached_property
    def quotient(self) -> Dict[str, str]:
        """Vertex map S -> R."""
        out = {}
        for g in self.classes:
            lab = class_label(g)
            for v in g:
                out[v] = lab
        return out

    @cached_property
    def quotient_image(self) -> Tree:
        q = self.quotient
        es = set()
        for e in self.middle.edges:
            if e in self.contract:
                continue
            a, b = tuple(e)
            es.add((q[a], q[b]))
        return Tree({q[v] for v in self.subtree}, sorted(es))

    @cached_property
    def section(self) -> Dict[str, FrozenSet[str]]:
        """R label -> its class in S."""
        return {class_label(g): g for g in self.classes}

    @property
    def inclusion(self) -> Dict[str, str]:
        return {v: v for v in self.subtree}

    def __len__(self):
        return len(self.classes)

    def is_trivial(self):
        return len(self.subtree) == len(self.target) and not self.contract

    def key(self):
        return (tuple(sorted(self.subtree)), tuple(sorted(edge_key(e) for e in self.contract)))

    def sort_key(self):
        return (-len(self.subtree), len(self.contract)) + self.key()

    def to_json(self) -> dict:
        s, c = self.key()
        return {"subtree": list(s), "contract": [list(e) for e in c]}

    @classmethod
    def from_json(cls, target: Tree, data: dict) -> "Correspondence":
        return cls(target, frozenset(data["subtree"]),
                   frozenset(frozenset(e) for e in data.get("contract", [])))

    def label(self) -> str:
        s, c = self.key()
        if self.is_trivial():
            return "p0"
        cs = ";".join(f"{a}{b}" if len(a) == len(b) == 1 else f"{a}-{b}" for a, b in c)
        return "S=" + ",".join(s) + ("/" + cs if cs else "")

    def __repr__(self):
        return f"Correspondence({self.label()})"


def class_label(g: Iterable[str]) -> str:
    g = sorted(g)
    if len(g) == 1:
        return g[0]
    return "(" + ",".join(g) + ")"


def trivial(T: Tree) -> Correspondence:
    return Correspondence(T, frozenset(T.vertices), frozenset())


def connected_subtrees(T: Tree) -> List[FrozenSet[str]]:
    """All vertex sets of connected subtrees, grown from singletons."""
    seen = set()
    frontier = [frozenset([v]) for v in T.vertices]
    seen.update(frontier)
    while frontier:
        nxt = []
        for s in frontier:
            for v in s:
                for w in T.adjacency[v]:
                    if w not in s:
                        t = s | {w}
                        if t not in seen:
                            seen.add(t)
                            nxt.append(t)
        frontier = nxt
    return sorted(seen, key=lambda s: (len(s), sorted(s)))


def enumerate_correspondences(T: Tree) -> List[Correspondence]:
    out = []
    for s in connected_subtrees(T):
        es = sorted(T.induced_edges(s), key=edge_key)
        for k in range(len(es) + 1):
            for c in itertools.combinations(es, k):
                out.append(Correspondence(T, s, frozenset(c)))
    out.sort(key=Correspondence.sort_key)
    return out


def count_formula(T: Tree) -> int:
    """Sum over connected subtrees S of 2^{|E(S)|}."""
    return sum(2 ** (len(s) - 1) for s in connected_subtrees(T))


def compose(outer: Correspondence, inner: Correspondence) -> Correspondence:
    """outer o inner, where outer is a correspondence on inner's quotient image."""
    if outer.target != inner.quotient_image:
        raise CompositionError(
            f"outer target {outer.target!r} differs from inner image {inner.quotient_image!r}")
    q_in = inner.quotient
    q_out = outer.quotient
    middle = frozenset(v for v in inner.subtree if q_in[v] in outer.subtree)
    contract = set()
    for e in inner.target.induced_edges(middle):
        a, b = tuple(e)
        if q_out[q_in[a]] == q_out[q_in[b]]:
            contract.add(e)
    return Correspondence(inner.target, middle, frozenset(contract))


def leq(p1: Correspondence, p2: Correspondence) -> Tuple[bool, Optional[Correspondence]]:
    """Whether p1 <= p2, i.e. p2 = q o p1 for some q; returns that q too.

    The witness is read off directly: its middle is the image of S2 in R1 and
    it contracts exactly the edges of R1 coming from edges contracted in p2.
    """
    if p1.target != p2.target:
        raise CompositionError("correspondences on different trees")
    S1, S2 = p1.subtree, p2.subtree
    if not S2 <= S1:
        return False, None
    q1 = p1.quotient
    # S2 must be a union of classes of p1, else q o p1 has a larger middle
    for g in p1.classes:
        if g & S2 and not g <= S2:
            return False, None
    if not (p1.contract & p1.target.induced_edges(S2)) <= p2.contract:
        return False, None
    mid = frozenset(q1[v] for v in S2)
    contract = set()
    for e in p1.target.induced_edges(S2):
        if e in p2.contract and e not in p1.contract:
            a, b = tuple(e)
            contract.add(frozenset((q1[a], q1[b])))
    w = Correspondence(p1.quotient_image, mid, frozenset(contract))
    return True, w


def leq_bruteforce(p1: Correspondence, p2: Correspondence) -> List[Correspondence]:
    """All q on p1's image tree with q o p1 == p2 (oracle for ``leq``)."""
    return [q for q in enumerate_correspondences(p1.quotient_image) if compose(q, p1) == p2]


def induced_roots(p: Correspondence, root: str) -> Tuple[str, str]:
    """(root of S, root of R): the vertex of S closest to the root and its image."""
    rt = RootedTree(p.target, root)
    rs = min(p.subtree, key=lambda v: (rt.depth[v], v))
    return rs, p.quotient[rs]


def rooted_quotient(p: Correspondence, root: str) -> RootedTree:
    return RootedTree(p.quotient_image, induced_roots(p, root)[1])


# ---------------------------------------------------------------------------
# construction helpers and small-tree catalogues

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def path_tree(n: int, labels: Optional[Sequence[str]] = None) -> Tree:
    labels = list(labels or _LETTERS[:n])
    return Tree(labels, [(labels[i], labels[i + 1]) for i in range(n - 1)])


def star_tree(k: int, center: str = "o", leaves: Optional[Sequence[str]] = None) -> Tree:
    leaves = list(leaves or _LETTERS[:k])
    return Tree([center] + leaves, [(center, l) for l in leaves])


def _prufer_tree(seq, n):
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        for leaf in range(n):
            if degree[leaf] == 1:
                edges.append((leaf, x))
                degree[leaf] -= 1
                degree[x] -= 1
                break
    u, v = [i for i in range(n) if degree[i] == 1]
    edges.append((u, v))
    return edges


def _rooted_code(adj, v, parent):
    return "(" + "".join(sorted(_rooted_code(adj, w, v) for w in adj[v] if w != parent)) + ")"


def rooted_canonical(rt: RootedTree) -> str:
    """AHU encoding; equal iff the rooted trees are isomorphic."""
    return _rooted_code(rt.tree.adjacency, rt.root, None)


def tree_canonical(T: Tree) -> str:
    return min(rooted_canonical(RootedTree(T, v)) for v in T.vertices)


def all_trees(n: int) -> List[Tree]:
    """One tree per isomorphism class on n vertices, labelled a, b, c, ..."""
    if n < 1:
        return []
    labels = _LETTERS[:n]
    if n == 1:
        return [Tree(labels)]
    if n == 2:
        return [path_tree(2)]
    found = {}
    for seq in itertools.product(range(n), repeat=n - 2):
        es = _prufer_tree(seq, n)
        T = Tree(labels, [(labels[a], labels[b]) for a, b in es])
        c = tree_canonical(T)
        if c not in found or T.sorted_edges < found[c].sorted_edges:
            found[c] = T
    return [found[c] for c in sorted(found)]


def all_rooted_trees(n: int) -> List[RootedTree]:
    """One rooted tree per isomorphism class on n vertices."""
    out = {}
    for T in all_trees(n):
        for v in T.vertices:
            rt = RootedTree(T, v)
            c = rooted_canonical(rt)
            out.setdefault(c, rt)
    return [out[c] for c in sorted(out)]


def trees_up_to(n: int) -> List[Tree]:
    return [T for k in range(1, n + 1) for T in all_trees(k)]


def rooted_trees_up_to(n: int) -> List[RootedTree]:
    return [rt for k in range(1, n + 1) for rt in all_rooted_trees(k)]


# ---------------------------------------------------------------------------
# parsing

_NAME = re.compile(r"[A-Za-z0-9_]+")


def parse_compact(text: str) -> RootedTree:
    """Parse nested-parentheses notation, e.g. ``b(a,c)`` or ``a(b(c))``.

    The outermost vertex is the root and children are listed in parentheses.
    """
    s = text.replace(" ", "")
    pos = 0
    verts: List[str] = []
    edges: List[Tuple[str, str]] = []

    def err(msg):
        raise TreeError(f"{msg} at column {pos + 1} of {text!r}")

    def node():
        nonlocal pos
        m = _NAME.match(s, pos)
        if not m:
            err("expected a vertex name")
        name = m.group(0)
        pos = m.end()
        verts.append(name)
        if pos < len(s) and s[pos] == "(":
            pos += 1
            while True:
                child = node()
                edges.append((name, child))
                if pos < len(s) and s[pos] == ",":
                    pos += 1
                    continue
                if pos < len(s) and s[pos] == ")":
                    pos += 1
                    break
                err("expected ',' or ')'")
        return name

    root = node()
    if pos != len(s):
        err("trailing characters")
    if len(set(verts)) != len(verts):
        raise TreeError(f"repeated vertex name in {text!r}")
    return RootedTree(Tree(verts, edges), root)


def to_compact(rt: RootedTree) -> str:
    def rec(v, parent):
        kids = [w for w in rt.tree.adjacency[v] if w != parent]
        if not kids:
            return v
        return v + "(" + ",".join(rec(w, v) for w in kids) + ")"

    return rec(rt.root, None)


def tree_from_json(data) -> Tuple[Tree, Optional[str]]:
    if isinstance(data, str):
        data = json.loads(data)
    if not isinstance(data, dict) or "vertices" not in data or "edges" not in data:
        raise TreeError("tree JSON needs 'vertices' and 'edges'")
    T = Tree(data["vertices"], data["edges"])
    root = data.get("root")
    if root is not None and root not in T.vertices:
        raise TreeError(f"root {root!r} is not a vertex")
    return T, root
