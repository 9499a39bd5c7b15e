"""Path-trees: spanning trees whose edges are realized by host paths.

All constructions share one reduction engine, :class:`StructuredTree`: a
rooted tree whose nodes are disjoint vertex sets, each carrying the paths
that already span it, and whose tree edges are realized by host paths.
Reductions merge a leaf into another node until only the root remains.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .cones import ConeParams, LL1Params, CheckedPathGraph, dense_path_graph, ll1_decomposition
from .equalize import balanced_orientation, split_fractions
from .errors import BudgetExhausted, DecompositionError, InvariantViolation, PreconditionError
from .graph import MultiGraph, find_bridge
from .pathgraph import OrientedPathGraph, Path, PathGraph, can_concatenate, orient_paths_balanced

log = logging.getLogger(__name__)


@dataclass
class PathTree:
    """Path-graph whose shadow is a tree on ``support``."""

    graph: PathGraph
    root: int
    support: frozenset

    @property
    def paths(self) -> list[Path]:
        return self.graph.paths

    def degree(self, v: int) -> int:
        return self.graph.degree(v)

    def violations(self) -> list[str]:
        out = []
        ends = set()
        for P in self.paths:
            ends.update(P.ends)
        if not ends <= self.support:
            out.append("path ends outside the support")
        if len(self.paths) != len(self.support) - 1:
            out.append(f"{len(self.paths)} paths for {len(self.support)} vertices")
        # union-find over the shadow
        parent = {v: v for v in self.support}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for P in self.paths:
            a, b = find(P.start), find(P.end)
            if a == b:
                out.append(f"shadow cycle through {P.start}-{P.end}")
                break
            parent[a] = b
        if len({find(v) for v in self.support}) > 1:
            out.append("shadow not connected")
        return out

    def max_degree(self) -> int:
        return max((self.degree(v) for v in self.support), default=0)


class StructuredTree:
    """Reduction state: a rooted tree of disjoint vertex sets.

    ``link[X]`` is the host path realizing the tree edge from ``X`` to its
    parent, oriented from its end in ``X`` to its end in the parent.
    ``paths[X]`` spans ``X``.  ``back[X]`` is the optional backward arc
    ``(edge id, y in X, target vertex)`` used by the bridgeless variant.
    """

    def __init__(self, variant: str, root: int):
        self.variant = variant
        self.root = root
        self.members: dict[int, set[int]] = {}
        self.node_of: dict[int, int] = {}
        self.parent: dict[int, int | None] = {}
        self.children: dict[int, set[int]] = {}
        self.link: dict[int, Path] = {}
        self.paths: dict[int, list[Path]] = {}
        self.back: dict[int, tuple[int, int, int]] = {}
        self.steps = 0
        self.unused: set[int] = set()

    # -- construction -------------------------------------------------------
    def add_node(self, x: int, members=None) -> None:
        self.members[x] = set(members or {x})
        for v in self.members[x]:
            self.node_of[v] = x
        self.parent[x] = None
        self.children[x] = set()
        self.paths[x] = []

    def attach(self, child: int, parent: int, link: Path) -> None:
        self.parent[child] = parent
        self.children[parent].add(child)
        self.link[child] = link

    @classmethod
    def from_path_tree(cls, variant: str, T: PathTree, root: int) -> "StructuredTree":
        """Singleton nodes with the tree edges realized by the paths of T."""
        st = cls(variant, root)
        for v in T.support:
            st.add_node(v)
        adj: dict[int, list[int]] = {}
        for i, P in enumerate(T.paths):
            adj.setdefault(P.start, []).append(i)
            adj.setdefault(P.end, []).append(i)
        seen = {root}
        queue = [root]
        for u in queue:
            for i in sorted(adj.get(u, ())):
                P = T.paths[i]
                w = P.other_end(u)
                if w in seen:
                    continue
                seen.add(w)
                st.attach(w, u, P.starting_at(w))
                queue.append(w)
        if len(seen) != len(T.support):
            raise InvariantViolation("path-tree shadow is not connected")
        return st

    # -- queries --------------------------------------------------------------
    def __len__(self) -> int:
        return len(self.members)

    def depth(self, x: int) -> int:
        d = 0
        while self.parent[x] is not None:
            x = self.parent[x]
            d += 1
        return d

    def depths(self) -> dict[int, int]:
        out = {self.root: 0}
        stack = [self.root]
        while stack:
            x = stack.pop()
            for c in self.children[x]:
                out[c] = out[x] + 1
                stack.append(c)
        return out

    def deepest_internal(self) -> int:
        depth = self.depths()
        internal = [x for x in self.members if self.children[x]]
        return min(internal, key=lambda x: (-depth[x], x))

    def deepest_leaf(self) -> int:
        depth = self.depths()
        leaves = [x for x in self.members if not self.children[x] and x != self.root]
        return min(leaves, key=lambda x: (-depth[x], x))

    def is_leaf(self, x: int) -> bool:
        return not self.children[x]

    def used_edges(self) -> list[int]:
        out = [e for x in self.members for P in self.paths[x] for e in P.edges]
        out += [e for x, P in self.link.items() for e in P.edges]
        out += [b[0] for b in self.back.values()]
        return out

    # -- mutation -------------------------------------------------------------
    def detach(self, x: int) -> None:
        p = self.parent[x]
        if p is not None:
            self.children[p].discard(x)
        self.parent[x] = None
        self.link.pop(x, None)

    def remove(self, x: int) -> None:
        """Drop a leaf node entirely (its vertices leave the tree)."""
        self.detach(x)
        for v in self.members.pop(x):
            if self.node_of.get(v) == x:
                del self.node_of[v]
        del self.children[x]
        del self.parent[x]
        del self.paths[x]
        self.back.pop(x, None)

    def absorb(self, target: int, leaf: int, *extra: Path) -> None:
        """Move leaf ``leaf`` into node ``target`` together with the paths ``extra``."""
        if self.children[leaf]:
            raise InvariantViolation(f"node {leaf} is not a leaf")
        self.paths[target].extend(self.paths[leaf])
        self.paths[target].extend(extra)
        members = self.members[leaf]
        self.members[target] |= members
        for v in members:
            self.node_of[v] = target
        self.members[leaf] = set()
        self.remove(leaf)
        self.steps += 1

    def final_tree(self, host: MultiGraph, support=None) -> PathTree:
        if len(self.members) != 1:
            raise InvariantViolation("structured tree not fully reduced")
        (x,) = self.members
        support = frozenset(self.members[x] if support is None else support)
        return PathTree(PathGraph(host, self.paths[x]), self.root, support)


# ---------------------------------------------------------------------------
# subcubic (1,2)-path-tree of a bridgeless multigraph
# ---------------------------------------------------------------------------


def _dfs(G: MultiGraph, root: int):
    parent_edge: dict[int, int | None] = {root: None}
    depth = {root: 0}
    order = [root]
    stack = [(root, iter(sorted(G.inc[root])))]
    while stack:
        u, it = stack[-1]
        for e in it:
            w = G.other(e, u)
            if w not in depth:
                depth[w] = depth[u] + 1
                parent_edge[w] = e
                order.append(w)
                stack.append((w, iter(sorted(G.inc[w]))))
                break
        else:
            stack.pop()
    return parent_edge, depth, order


def _prune_back_arcs(st: StructuredTree) -> None:
    """Delete, in edge-id order, every backward arc not needed for strong connectivity.

    The digraph is strongly connected iff every non-root node has, in its
    subtree, a backward arc reaching strictly above it.
    """
    depth = st.depths()

    def lows():
        best: dict[int, list[tuple[int, int]]] = {}
        for x in sorted(st.members, key=lambda y: -depth[y]):
            cand = []
            if x in st.back:
                e, _, tgt = st.back[x]
                cand.append((depth[st.node_of[tgt]], e))
            for c in st.children[x]:
                cand.extend(best[c])
            best[x] = sorted(cand)[:2]
        return best

    best = lows()
    for x in sorted(st.back, key=lambda y: st.back[y][0]):
        e = st.back[x][0]
        needed = False
        c = x
        while c != st.root:
            options = [d for d, arc in best[c] if arc != e]
            if not options or options[0] >= depth[c]:
                needed = True
                break
            c = st.parent[c]
        if not needed:
            st.unused.add(e)
            del st.back[x]
            best = lows()


def _strongly_connected(st: StructuredTree) -> bool:
    depth = st.depths()
    low: dict[int, int] = {}
    for x in sorted(st.members, key=lambda y: -depth[y]):
        vals = [low[c] for c in st.children[x]]
        if x in st.back:
            vals.append(depth[st.node_of[st.back[x][2]]])
        low[x] = min(vals, default=depth[x])
    return all(low[x] < depth[x] for x in st.members if x != st.root)


def check_bridgeless_tree(st: StructuredTree, G: MultiGraph) -> list[str]:
    """Invariants of the structured tree used for the subcubic (1,2)-path-tree."""
    out = []
    seen: set[int] = set()
    for x, mem in st.members.items():
        if seen & mem:
            out.append("node sets overlap")
        seen |= mem
    if seen != set(range(G.n)):
        out.append("node sets do not cover the vertices")
    for x in st.members:
        if st.children[x] and len(st.members[x]) != 1:
            out.append(f"internal node {x} is not a singleton")
    if not _strongly_connected(st):
        out.append("not strongly connected")
    used = st.used_edges()
    if len(used) != len(set(used)):
        out.append("a host edge is used twice")
    for x in st.members:
        if st.children[x]:
            continue
        deg: dict[int, int] = {}
        for P in st.paths[x]:
            if len(P) not in (1, 2):
                out.append(f"path of length {len(P)} in node {x}")
            for v in P.ends:
                deg[v] = deg.get(v, 0) + 1
        if any(d > 3 for d in deg.values()):
            out.append(f"node {x} path-tree has degree above 3")
        ends = []
        if x in st.link:
            ends.append(st.link[x].start)
        if x in st.back:
            ends.append(st.back[x][1])
        for v in set(ends):
            if deg.get(v, 0) + ends.count(v) > 3:
                out.append(f"arc endpoint {v} in node {x} would exceed degree 3")
    return out


def subcubic_12_path_tree(G: MultiGraph, root: int = 0, check: bool = False) -> PathTree:
    """Spanning (1,2)-path-tree of maximum shadow degree 3 of a bridgeless graph.

    Start from a DFS tree with one backward arc (the one reaching highest)
    per vertex, then repeatedly contract the children of a deepest
    internal node using the four merge rules.  ``check`` re-validates the
    structured-tree invariants after every step.
    """
    if G.n == 0:
        raise PreconditionError("empty graph")
    if not G.is_connected():
        raise PreconditionError("graph is not connected")
    bridge = find_bridge(G)
    if bridge is not None:
        raise PreconditionError(f"edge {bridge} {G.ends[bridge]} is a bridge", bridge=bridge)
    parent_edge, depth, order = _dfs(G, root)
    st = StructuredTree("bridgeless", root)
    for v in range(G.n):
        st.add_node(v)
    for v in order[1:]:
        e = parent_edge[v]
        st.attach(v, G.other(e, v), Path.edge(e, v, G.other(e, v)))
    tree_edges = {e for e in parent_edge.values() if e is not None}
    for e, u, w in G.edges():
        if e in tree_edges:
            continue
        lo, hi = (u, w) if depth[u] > depth[w] else (w, u)
        cur = st.back.get(lo)
        if cur is None or (depth[hi], e) < (depth[cur[2]], cur[0]):
            if cur is not None:
                st.unused.add(cur[0])
            st.back[lo] = (e, lo, hi)
        else:
            st.unused.add(e)

    while len(st) > 1:
        _prune_back_arcs(st)
        if check:
            bad = check_bridgeless_tree(st, G)
            if bad:
                raise InvariantViolation(f"structured tree broken: {bad[:3]}")
        j = st.deepest_internal()
        xj = next(iter(st.members[j]))
        depth_now = st.depths()
        kids = list(st.children[j])
        for c in kids:
            if c not in st.back:
                raise InvariantViolation(f"leaf {c} has no backward arc")
        kids.sort(key=lambda c: (-depth_now[st.node_of[st.back[c][2]]], c))
        r = len(kids)
        has_back = j in st.back
        if r >= 3 or (r == 2 and has_back):
            x1, x2 = kids[0], kids[1]
            l1, l2 = st.link[x1], st.link[x2]
            e1, y1, t1 = st.back[x1]
            bridge_path = Path((l1.start, xj, l2.start), (l1.edges[0], l2.edges[0]))
            back2 = st.back.pop(x2)
            del st.back[x1]
            st.detach(x1)
            st.absorb(x1, x2, bridge_path)
            st.attach(x1, st.node_of[t1], Path.edge(e1, y1, t1))
            st.back[x1] = back2
            log.debug("bridgeless case 3: merged %s and %s under %s", x1, x2, st.node_of[t1])
        elif r == 1:
            x1 = kids[0]
            l1 = st.link[x1]
            back1 = st.back.pop(x1)
            st.absorb(j, x1, l1)
            if has_back:
                st.unused.add(back1[0])
            elif j != st.root:
                st.back[j] = back1
            log.debug("bridgeless case %d: merged %s into %s", 2 if has_back else 1, x1, j)
        else:
            x1, x2 = kids
            l1, l2 = st.link[x1], st.link[x2]
            back1 = st.back.pop(x1)
            back2 = st.back.pop(x2)
            st.absorb(j, x1, l1)
            st.absorb(j, x2, l2)
            st.unused.add(back1[0])
            if j != st.root:
                st.back[j] = back2
            else:
                st.unused.add(back2[0])
            log.debug("bridgeless case 4: merged %s, %s into %s", x1, x2, j)
    T = st.final_tree(G, support=range(G.n))
    bad = T.violations()
    if bad or T.max_degree() > 3 or not set(T.graph.lengths()) <= {1, 2}:
        raise InvariantViolation(f"subcubic path-tree check failed: {bad[:3]}")
    return T


# ---------------------------------------------------------------------------
# growing path lengths with private edges
# ---------------------------------------------------------------------------


@dataclass
class GrowResult:
    tree: PathTree
    unused: frozenset
    stats: dict = field(default_factory=dict)


def extend_path_tree(T: PathTree, H: MultiGraph, k: int, seed=None, strict_degree: bool = True,
                     host: MultiGraph | None = None, private_rule: str = "out") -> GrowResult:
    """Turn a spanning (1,k)-path-tree into a (1,k+1)-path-tree using private edges of H.

    H is oriented in a balanced way; the out-arcs of v are its private
    edges.  A deepest internal node either absorbs a child joined by a
    1-path, or sends a child's k-path one private edge further.  With
    ``private_rule="any"`` every unused edge at v counts as private.
    """
    if k < 2:
        raise PreconditionError("k must be at least 2")
    host = host if host is not None else T.graph.host.union(H)
    touched = {v for P in T.paths for v in P.verts} | {v for v in range(H.n) if H.degree(v)}
    if not touched <= T.support:
        raise PreconditionError("path-tree does not span the vertices of its paths and of H",
                                outside=sorted(touched - T.support)[:10])
    for v in T.support:
        if H.degree(v) < 2 * (T.degree(v) + 2 * k):
            if strict_degree:
                raise PreconditionError(f"vertex {v} has {H.degree(v)} additional edges; needs {2 * (T.degree(v) + 2 * k)}",
                                        vertex=v)
    rng = random.Random(seed)
    if private_rule == "any":
        private = {v: list(H.inc[v]) for v in range(H.n)}
    else:
        D = balanced_orientation(H, seed=rng.random())
        private = {v: sorted(D.out_edges(v)) for v in range(H.n)}
    for lst in private.values():
        rng.shuffle(lst)
    spent: set[int] = set()
    st = StructuredTree("grow", T.root)
    st = StructuredTree.from_path_tree("grow", T, T.root)

    def private_edge(x: int, forbidden: set[int]) -> tuple[int, int]:
        for e in private.get(x, ()):
            if e in spent:
                continue
            y = H.other(e, x)
            if y not in forbidden:
                spent.add(e)
                return e, y
        raise BudgetExhausted(f"vertex {x} ran out of private edges", vertex=x, k=k)

    while len(st) > 1:
        j = st.deepest_internal()
        kids = sorted(st.children[j])
        centers = {st.link[c].end for c in kids}
        if len(centers) != 1:
            raise InvariantViolation(f"node {j} has no unique center")
        (xj,) = centers
        short = [c for c in kids if len(st.link[c]) == 1]
        if short:
            st.absorb(j, short[0], st.link[short[0]])
            continue
        x1 = kids[0]
        if len(kids) >= 2:
            x2 = kids[1]
            e, y = private_edge(xj, set(st.link[x1].verts) | set(st.link[x2].verts))
            if st.node_of[y] == x1:
                x1, x2 = x2, x1
            st.absorb(st.node_of[y], x1, st.link[x1].join(Path.edge(e, xj, y)))
        else:
            e, y = private_edge(xj, set(st.link[x1].verts))
            if st.node_of[y] != x1:
                st.absorb(st.node_of[y], x1, st.link[x1].join(Path.edge(e, xj, y)))
            else:
                st.unused.update(st.link[x1].edges)
                st.absorb(j, x1, Path.edge(e, xj, y))
    out = st.final_tree(host, support=T.support)
    bad = out.violations()
    if bad or not set(out.graph.lengths()) <= {1, k + 1}:
        raise InvariantViolation(f"extended path-tree check failed: {bad[:3]} {dict(out.graph.lengths())}")
    used = out.graph.edge_ids()
    unused = (T.graph.edge_ids() | set(H.ends)) - used
    return GrowResult(out, frozenset(unused), {"private_used": len(spent)})


def grow_1_ellplus1(G: MultiGraph, H: MultiGraph, ell: int, seed=None, growth: int = 4,
                    strict_degree: bool = False, private_rule: str = "out") -> GrowResult:
    """Spanning (1, ell+1)-path-tree of G plus H.

    H is split into edge-disjoint fractions H_1..H_{ell-1} whose shares grow
    by the factor ``growth``; stage i lengthens the long paths by one edge
    using H_i.
    """
    rng = random.Random(seed)
    host = G.union(H)
    T = subcubic_12_path_tree(G)
    unused = set(G.ends) - T.graph.edge_ids()
    if ell <= 1:
        return GrowResult(T, frozenset(unused | set(H.ends)))
    weights = [growth ** i for i in range(ell - 1)]
    total = sum(weights)
    parts = split_fractions(H, [Fraction(w, total) for w in weights[:-1]], seed=rng.random())
    parts.append(frozenset(H.ends) - frozenset().union(*parts))
    stats = {}
    for i, part in enumerate(parts, start=1):
        try:
            res = extend_path_tree(T, H.subgraph(part), i + 1, seed=rng.random(), strict_degree=strict_degree,
                                   host=host, private_rule=private_rule)
        except DecompositionError as exc:
            raise exc.tagged(f"grow[{i + 1}]")
        T = res.tree
        unused = (unused - T.graph.edge_ids()) | res.unused
        stats[f"stage{i}_private"] = res.stats["private_used"]
    stats["dominated"] = all(T.degree(v) <= H.degree(v) for v in T.support)
    return GrowResult(PathTree(PathGraph(host, T.paths), T.root, T.support), frozenset(unused), stats)


# ---------------------------------------------------------------------------
# bipartite (ell, 2 ell)-path-tree
# ---------------------------------------------------------------------------


@dataclass
class TreeParams:
    """Desk knobs for the path-tree constructions."""

    tree_fraction: Fraction = Fraction(1, 2)  # share of H spent on the (1, ell+1)-tree
    growth: int = 4
    eps: float = 0.3
    cones: ConeParams = field(default_factory=ConeParams)
    strict_degree: bool = False
    private_rule: str = "out"  # "any": unused edges and paths at v count as private whatever their direction


def bipartite_l2l_tree(G: MultiGraph, H: MultiGraph, A, ell: int, params: TreeParams | None = None,
                       seed=None) -> GrowResult:
    """(ell, 2 ell)-path-tree spanning the side A of a bipartite G plus H.

    ``ell`` must be even.  A (1, ell+1)-path-tree is grown from G with part
    of H, the rest of H becomes a dense (ell-1)-path-graph whose outgoing
    paths serve as private paths.  Every B-node is contracted away by
    gluing a child's tree path to a private path of its center.
    """
    params = params or TreeParams()
    if ell < 2 or ell % 2:
        raise PreconditionError("ell must be even and positive")
    A = frozenset(A)
    for M, name in ((G, "G"), (H, "H")):
        for e, u, v in M.edges():
            if (u in A) == (v in A):
                raise PreconditionError(f"edge {e} of {name} does not cross the bipartition")
    rng = random.Random(seed)
    host = G.union(H)
    part = split_fractions(H, [params.tree_fraction], seed=rng.random())[0]
    H_tree, H_rest = H.subgraph(part), H.without(part)
    grown = grow_1_ellplus1(G, H_tree, ell, seed=rng.random(), growth=params.growth,
                            strict_degree=params.strict_degree, private_rule=params.private_rule)
    T = grown.tree
    try:
        dense = dense_path_graph(H_rest, ell - 1, params.eps, params.cones, seed=rng.random(), strict=False)
    except DecompositionError as exc:
        raise exc.tagged("l2l")
    Hp: OrientedPathGraph = dense.H
    if params.private_rule == "any":
        private: dict[int, list[int]] = {}
        for i, P in enumerate(Hp.paths):
            for x in P.ends:
                private.setdefault(x, []).append(i)
    else:
        private = {v: list(Hp.private(v)) for v in range(host.n)}
    for lst in private.values():
        rng.shuffle(lst)
    spent: set[int] = set()
    spent_at: dict[int, int] = {}

    def private_path(x: int, *against: Path) -> Path:
        for i in private.get(x, ()):
            if i in spent:
                continue
            Q = Hp.paths[i].starting_at(x)
            if all(can_concatenate(P, Q, x) for P in against):
                spent.add(i)
                spent_at[x] = spent_at.get(x, 0) + 1
                return Q
        raise BudgetExhausted(f"vertex {x} ran out of private {ell - 1}-paths", vertex=x,
                              supply=len(private.get(x, ())), used=spent_at.get(x, 0))

    root = min(A)
    st = StructuredTree.from_path_tree("l2l", PathTree(T.graph, root, T.support), root)
    while True:
        for x in [x for x in st.members if x != root and st.is_leaf(x) and x not in A]:
            # a B-leaf: drop it, its tree path returns to the remainder
            stack = [x]
            while stack:
                y = stack.pop()
                if y not in st.members or not st.is_leaf(y) or y == root or y in A:
                    continue
                p = st.parent[y]
                st.unused.update(st.link[y].edges)
                st.remove(y)
                st.steps += 1
                if p is not None:
                    stack.append(p)
        if len(st) == 1:
            break
        j = st.deepest_internal()
        if j in A or len(st.members[j]) != 1:
            raise InvariantViolation(f"deepest internal node {j} is not a B singleton")
        xj = j
        kids = sorted(st.children[j])
        x1 = kids[0]
        if len(kids) >= 2:
            x2 = kids[1]
            Q = private_path(xj, st.link[x1], st.link[x2])
            if st.node_of[Q.end] == x1:
                x1, x2 = x2, x1
            st.absorb(st.node_of[Q.end], x1, st.link[x1].join(Q))
        else:
            par_link = st.link[j]
            Q = private_path(xj, st.link[x1], par_link)
            if st.node_of.get(Q.end) != x1:
                st.absorb(st.node_of[Q.end], x1, st.link[x1].join(Q))
            else:
                st.unused.update(st.link[x1].edges)
                parent = st.parent[j]
                st.absorb(parent, x1, par_link.reversed().join(Q))
                st.link.pop(j, None)
                st.remove(j)
    out = st.final_tree(host, support=A)
    bad = out.violations()
    lengths = set(out.graph.lengths())
    if bad or not lengths <= {ell, 2 * ell}:
        raise InvariantViolation(f"(ell, 2ell)-path-tree check failed: {bad[:3]} lengths {lengths}")
    used = out.graph.edge_ids()
    unused = (set(G.ends) | set(H.ends)) - used
    stats = {"private_used_max": max(spent_at.values(), default=0),
             "private_cap_ok": all(4 * spent_at[v] <= max(Hp.out_degree(v), 1) for v in spent_at),
             "dominated": all(out.degree(v) <= H.degree(v) for v in A),
             "dense_remainder": len(dense.R), **{f"grow_{k}": v for k, v in grown.stats.items()}}
    return GrowResult(out, frozenset(unused), stats)


# ---------------------------------------------------------------------------
# connected [ell, ell+3]-path-graph
# ---------------------------------------------------------------------------


@dataclass
class CoverParams:
    fraction: Fraction | None = None  # share of G2 feeding the private paths; None -> 1/(5 ell)
    ll1: LL1Params = field(default_factory=LL1Params)
    strict: bool = False  # require the conflict bound


def cover_llp1(G1: MultiGraph, G2: MultiGraph, ell: int, params: CoverParams | None = None,
               seed=None) -> CheckedPathGraph:
    """Connected path-graph with lengths in [ell, ell+3] decomposing G1 plus G2.

    G1 (bridgeless) provides a subcubic (1,2)-path-tree; its unused edges
    join G2.  G2 is split into two parts, each decomposed into
    (ell, ell+1)-paths.  Leaves of the tree are then contracted one by
    one, each tree path being extended by a private path of the first
    part.
    """
    params = params or CoverParams()
    frac = params.fraction if params.fraction is not None else Fraction(1, 5 * ell)
    rng = random.Random(seed)
    host = G1.union(G2)
    try:
        T = subcubic_12_path_tree(G1)
    except DecompositionError as exc:
        raise exc.tagged("cover/tree")
    rest = host.without(T.graph.edge_ids())
    part = split_fractions(rest, [frac], seed=rng.random())[0]
    try:
        H1 = ll1_decomposition(rest.subgraph(part), ell, params.ll1, seed=rng.random())
        second = rest.without(part)
        if second.m:
            H2 = ll1_decomposition(second, ell, params.ll1, seed=rng.random())
        else:
            H2 = CheckedPathGraph(PathGraph(second, []), {}, {})
    except DecompositionError as exc:
        raise exc.tagged("cover")
    O1 = orient_paths_balanced(H1.graph, seed=rng.random())
    # pool of extendable paths; in "any" mode every path of H1 and H2 may be
    # entered from either end, otherwise only outgoing paths of H1 qualify
    if params.ll1.private_rule == "any":
        pool = list(H1.graph.paths) + list(H2.graph.paths)
        private: dict[int, list[int]] = {}
        for i, P in enumerate(pool):
            for x in P.ends:
                private.setdefault(x, []).append(i)
    else:
        pool = list(O1.paths)
        private = {v: list(O1.private(v)) for v in range(host.n)}
    for lst in private.values():
        rng.shuffle(lst)
    spent: set[int] = set()
    returned: list[Path] = []

    def private_path(x: int, against: Path) -> Path:
        for i in private.get(x, ()):
            if i in spent:
                continue
            Q = pool[i].starting_at(x)
            if can_concatenate(against, Q, x):
                spent.add(i)
                return Q
        raise BudgetExhausted(f"vertex {x} ran out of private paths", vertex=x, stage="cover")

    root = min(T.support)
    st = StructuredTree.from_path_tree("cover", T, root)
    while len(st) > 1:
        x1 = st.deepest_leaf()
        j = st.parent[x1]
        p = st.link[x1]
        xj = p.end
        Q = private_path(xj, p)
        k = st.node_of[Q.end]
        if k != x1:
            st.absorb(k, x1, p.join(Q))
        else:
            Z = private_path(xj, p)
            st.absorb(j, x1, Q)
            returned.append(p.join(Z))
    tree = st.final_tree(host, support=T.support)
    paths = tree.paths + [P for i, P in enumerate(pool) if i not in spent] + returned
    if params.ll1.private_rule != "any":
        paths += list(H2.graph.paths)
    H = PathGraph(host, paths)
    if H.edge_ids() != set(host.ends):
        raise InvariantViolation("[ell, ell+3]-path-graph does not cover the graph")
    lengths = set(H.lengths())
    if not all(ell <= x <= ell + 3 for x in lengths):
        raise InvariantViolation(f"path lengths {sorted(lengths)} outside [ell, ell+3]")
    conf = H.conflict_ratio()
    checks = {"connected": H.is_connected(), "lengths": True, "conflict": conf < Fraction(1, 2 * (ell + 10))}
    if not checks["connected"]:
        raise InvariantViolation("[ell, ell+3]-path-graph is not connected")
    if params.strict and not checks["conflict"]:
        raise BudgetExhausted(f"conflict ratio {conf} not below 1/{2 * (ell + 10)}", stage="cover")
    stats = {"conf": float(conf), "tree_paths": len(tree.paths), "private_used": len(spent),
             "returned": len(returned), "ll1_first": H1.stats, "ll1_second": H2.stats}
    return CheckedPathGraph(H, checks, stats)


# ---------------------------------------------------------------------------
# parity correction
# ---------------------------------------------------------------------------


def parity_subtree(T: PathTree, X) -> list[int]:
    """Indices of paths of T whose shadow has odd degree exactly on X.

    Bottom-up on the shadow tree: the path to a vertex's parent is taken
    iff the vertex's subtree holds an odd number of X vertices.
    """
    X = set(X)
    if len(X) % 2:
        raise PreconditionError("X must have even size")
    if not X <= T.support:
        raise PreconditionError("X is not inside the path-tree support")
    adj: dict[int, list[int]] = {}
    for i, P in enumerate(T.paths):
        adj.setdefault(P.start, []).append(i)
        adj.setdefault(P.end, []).append(i)
    order, parent_path = [T.root], {T.root: None}
    for u in order:
        for i in adj.get(u, ()):
            w = T.paths[i].other_end(u)
            if w not in parent_path:
                parent_path[w] = i
                order.append(w)
    odd = {v: v in X for v in order}
    chosen = []
    for v in reversed(order[1:]):
        i = parent_path[v]
        if odd[v]:
            chosen.append(i)
            u = T.paths[i].other_end(v)
            odd[u] = not odd[u]
    return sorted(chosen)
