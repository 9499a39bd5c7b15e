"""Independent checks, exact search and graph generators.

Nothing here reuses the construction code: decompositions are checked
from their vertex sequences alone, and decomposability is decided by
exhaustive search.
"""

from __future__ import annotations

import itertools
import pickle
import random
import time
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path as FsPath

from .errors import BudgetExhausted, PreconditionError
from .graph import MultiGraph


# ---------------------------------------------------------------------------
# verifying a decomposition
# ---------------------------------------------------------------------------


@dataclass
class VerificationReport:
    verdict: bool
    violations: list[tuple[str, object]] = field(default_factory=list)
    counters: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.verdict


def _sequences(D) -> tuple[list[list[int]], list[int] | None]:
    """Vertex sequences of the ell-paths and of the leftover."""
    if isinstance(D, dict):
        return [list(p) for p in D["paths"]], (list(D["leftover"]) if D.get("leftover") else None)
    paths = [list(P.verts) for P in D.paths]
    leftover = list(D.leftover.verts) if D.leftover is not None else None
    return paths, leftover


def verify_decomposition(G: MultiGraph, D, ell: int) -> VerificationReport:
    """Check that D partitions E(G) into simple ell-paths plus at most one shorter path.

    ``D`` is a decomposition object or a report dictionary whose paths are
    vertex sequences (vertex ids of G).  Parallel edges are matched as a
    multiset of vertex pairs.
    """
    paths, leftover = _sequences(D)
    bad: list[tuple[str, object]] = []
    listed: Counter = Counter()
    everything = [(k, p) for k, p in enumerate(paths)]
    if leftover is not None:
        everything.append(("leftover", leftover))
    for k, p in everything:
        if len(set(p)) != len(p):
            bad.append(("not simple", k))
        if len(p) < 2:
            bad.append(("empty path", k))
        if any(not (0 <= v < G.n) for v in p):
            bad.append(("unknown vertex", k))
            continue
        for u, v in zip(p, p[1:]):
            listed[(min(u, v), max(u, v))] += 1
    for k, p in enumerate(paths):
        if len(p) - 1 != ell:
            bad.append(("wrong length", k))
    if leftover is not None and not 1 <= len(leftover) - 1 <= ell:
        bad.append(("leftover length", len(leftover) - 1))
    present = Counter()
    for u, v in G.ends.values():
        present[(min(u, v), max(u, v))] += 1
    for pair in sorted(set(listed) | set(present)):
        a, b = listed.get(pair, 0), present.get(pair, 0)
        if a > b:
            bad.append(("duplicate edge" if b else "not an edge", pair))
        elif a < b:
            bad.append(("uncovered edge", pair))
    counters = {"paths": len(paths), "leftover": 0 if leftover is None else len(leftover) - 1,
                "coverage_delta": sum(listed.values()) - G.m}
    return VerificationReport(not bad, bad, counters)


# ---------------------------------------------------------------------------
# exact search
# ---------------------------------------------------------------------------


@dataclass
class OracleResult:
    verdict: bool
    witness: list[tuple[tuple[int, ...], tuple[int, ...]]] | None = None  # (vertices, edge ids)
    nodes: int = 0
    seconds: float = 0.0

    def as_report(self) -> dict:
        return {"paths": [list(v) for v, _ in self.witness or []], "leftover": None}


class _Search:
    def __init__(self, G: MultiGraph, ell: int, memo: set, deadline: float | None):
        self.ell = ell
        self.ids = sorted(G.ends)
        self.ends = [G.ends[e] for e in self.ids]
        self.inc: dict[int, list[int]] = {}
        for i, (u, v) in enumerate(self.ends):
            self.inc.setdefault(u, []).append(i)
            self.inc.setdefault(v, []).append(i)
        self.memo = memo
        self.deadline = deadline
        self.nodes = 0

    def feasible(self, mask: int) -> bool:
        """Cheap necessary conditions on the uncovered edges."""
        ell = self.ell
        count = mask.bit_count()
        if count % ell:
            return False
        deg: Counter = Counter()
        parent: dict[int, int] = {}

        def find(x):
            while parent.setdefault(x, x) != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        m = mask
        while m:
            low = m & -m
            i = low.bit_length() - 1
            m ^= low
            u, v = self.ends[i]
            deg[u] += 1
            deg[v] += 1
            parent[find(u)] = find(v)
        odd = sum(1 for d in deg.values() if d % 2)
        if odd > 2 * (count // ell):
            return False
        sizes: Counter = Counter()
        m = mask
        while m:
            low = m & -m
            i = low.bit_length() - 1
            m ^= low
            sizes[find(self.ends[i][0])] += 1
        return all(s % ell == 0 for s in sizes.values())

    def paths_through(self, i: int, mask: int):
        """All simple ell-paths over uncovered edges that contain edge i."""
        ell = self.ell
        u, v = self.ends[i]

        def grow(x, length, used_v, used_e):
            if length == 0:
                yield [x], []
                return
            for j in self.inc[x]:
                if not (mask >> j) & 1 or j in used_e:
                    continue
                a, b = self.ends[j]
                y = b if a == x else a
                if y in used_v:
                    continue
                for verts, edges in grow(y, length - 1, used_v | {y}, used_e | {j}):
                    yield [x] + verts, [j] + edges

        for left in range(ell):
            right = ell - 1 - left
            for lv, le in grow(u, left, {u, v}, {i}):
                for rv, re in grow(v, right, {v} | set(lv), {i} | set(le)):
                    yield lv[::-1] + rv, le[::-1] + [i] + re

    def solve(self, mask: int, out: list) -> bool:
        if mask == 0:
            return True
        if mask in self.memo:
            return False
        self.nodes += 1
        if self.deadline is not None and self.nodes % 256 == 0 and time.monotonic() > self.deadline:
            raise BudgetExhausted("oracle time limit reached", nodes=self.nodes)
        if not self.feasible(mask):
            self.memo.add(mask)
            return False
        i = (mask & -mask).bit_length() - 1
        for verts, edges in self.paths_through(i, mask):
            rest = mask
            for j in edges:
                rest &= ~(1 << j)
            out.append((tuple(verts), tuple(self.ids[j] for j in edges)))
            if self.solve(rest, out):
                return True
            out.pop()
        self.memo.add(mask)
        return False


def brute_force_decomposable(G: MultiGraph, ell: int, limit: int = 128, time_limit: float | None = None,
                             checkpoint: str | None = None) -> OracleResult:
    """Exact decision: can E(G) be partitioned into simple ell-paths?

    Backtracking on the lowest uncovered edge, pruned by divisibility per
    component, an odd-degree count, and a memo of failed edge sets.  With
    ``checkpoint`` the failure memo is loaded from and saved to that file,
    so an interrupted run resumes where it stopped.
    """
    if ell < 1:
        raise PreconditionError("ell must be positive")
    if G.m > limit:
        raise PreconditionError(f"{G.m} edges exceed the oracle limit {limit}")
    t = time.monotonic()
    memo: set[int] = set()
    store = FsPath(checkpoint) if checkpoint else None
    if store is not None and store.exists():
        memo = pickle.loads(store.read_bytes())
    deadline = t + time_limit if time_limit is not None else None
    search = _Search(G, ell, memo, deadline)
    out: list = []
    try:
        found = search.solve((1 << G.m) - 1, out) if G.m else True
    except BudgetExhausted as exc:
        if store is not None:
            store.write_bytes(pickle.dumps(memo))
        exc.details["memo"] = len(memo)
        raise
    if store is not None:
        store.write_bytes(pickle.dumps(memo))
    return OracleResult(found, out if found else None, search.nodes, time.monotonic() - t)


def partition_decomposable(G: MultiGraph, ell: int) -> bool:
    """Second exact checker: try every partition of E(G) into blocks of ell edges.

    This is the edge-sequence permutation search with block order and
    order inside a block factored out; each block must induce a simple path.
    """
    ids = sorted(G.ends)
    if len(ids) % ell:
        return False

    def is_path(block) -> bool:
        deg: Counter = Counter()
        for e in block:
            u, v = G.ends[e]
            deg[u] += 1
            deg[v] += 1
        if len(deg) != ell + 1 or max(deg.values()) > 2:
            return False
        # connected with |V| = |E| + 1 means a tree; max degree 2 makes it a path
        seen, stack = set(), [G.ends[block[0]][0]]
        adj: dict[int, list[int]] = {}
        for e in block:
            u, v = G.ends[e]
            adj.setdefault(u, []).append(v)
            adj.setdefault(v, []).append(u)
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            stack.extend(adj[x])
        return len(seen) == ell + 1

    def rec(rest: tuple) -> bool:
        if not rest:
            return True
        first, others = rest[0], rest[1:]
        for combo in itertools.combinations(others, ell - 1):
            block = (first,) + combo
            if is_path(block):
                left = tuple(e for e in others if e not in combo)
                if rec(left):
                    return True
        return False

    return rec(tuple(ids))


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def gen_circulant(n: int, offsets) -> MultiGraph:
    """C_n(offsets): vertex i adjacent to i +- s (mod n)."""
    offsets = list(offsets)
    if len(set(offsets)) != len(offsets) or any(not 0 < s <= n / 2 for s in offsets):
        raise PreconditionError("offsets must be distinct and lie in 1..n/2")
    pairs = []
    for s in offsets:
        count = n // 2 if 2 * s == n else n
        pairs.extend((i, (i + s) % n) for i in range(count))
    return MultiGraph.from_edges(n, pairs)


def gen_random_regular(n: int, d: int, seed=None, max_tries: int = 10_000) -> MultiGraph:
    """Simple d-regular graph from the pairing model, rejecting loops and multi-edges."""
    if (n * d) % 2 or d >= n or d < 0:
        raise PreconditionError("need n*d even and 0 <= d < n")
    rng = random.Random(seed)
    points = [v for v in range(n) for _ in range(d)]
    for _ in range(max_tries):
        rng.shuffle(points)
        pairs = list(zip(points[::2], points[1::2]))
        keys = {(min(u, v), max(u, v)) for u, v in pairs}
        if all(u != v for u, v in pairs) and len(keys) == len(pairs):
            return MultiGraph.from_edges(n, sorted(keys))
    raise BudgetExhausted(f"no simple pairing after {max_tries} tries")


def gen_random_multigraph(n: int, m: int, seed=None, connected: bool = True) -> MultiGraph:
    """m random edges (parallel edges allowed, no loops); a spanning tree first when connected."""
    if n < 2 and m:
        raise PreconditionError("need two vertices for an edge")
    rng = random.Random(seed)
    pairs = []
    if connected:
        if m < n - 1:
            raise PreconditionError("too few edges for a connected graph")
        order = list(range(n))
        rng.shuffle(order)
        pairs = [(order[i], order[rng.randrange(i)]) for i in range(1, n)]
    while len(pairs) < m:
        u, v = rng.sample(range(n), 2)
        pairs.append((u, v))
    return MultiGraph.from_edges(n, pairs)


def gen_two_edge_connected(n: int, seed=None, extra: int = 0) -> MultiGraph:
    """Random 2-edge-connected multigraph on n vertices built from ears.

    Start from a cycle on a few vertices; each ear is a path of new
    vertices between two existing (possibly equal) vertices.  ``extra``
    further random edges are added at the end.
    """
    if n < 2:
        raise PreconditionError("need at least two vertices")
    rng = random.Random(seed)
    base = min(n, rng.randint(2, 5))
    pairs = [(i, (i + 1) % base) for i in range(base)] if base > 2 else [(0, 1), (0, 1)]
    nxt = base
    while nxt < n:
        k = rng.randint(1, min(4, n - nxt))
        a, b = rng.randrange(nxt), rng.randrange(nxt)
        chain = [a] + list(range(nxt, nxt + k)) + [b]
        pairs.extend(zip(chain, chain[1:]))
        nxt += k
    for _ in range(extra):
        u, v = rng.sample(range(n), 2)
        pairs.append((u, v))
    return MultiGraph.from_edges(n, pairs)


def gen_fig1_gadget() -> MultiGraph:
    """Center joined to three arms; each arm is three 8-edge paths closed off by an apex.

    Vertex 0 is the center.  85 vertices, 90 edges, edge-connectivity 2.
    """
    pairs = []
    nxt = 1
    for _ in range(3):
        apex = nxt
        nxt += 1
        for _ in range(3):
            column = list(range(nxt, nxt + 9))
            nxt += 9
            pairs.append((0, column[0]))
            pairs.extend(zip(column, column[1:]))
            pairs.append((column[-1], apex))
    G = MultiGraph.from_edges(nxt, pairs)
    assert G.n == 85 and G.m == 90 == 3 * (3 * 8 + 3 + 3)
    return G


def small_connected_corpus(max_edges: int = 8) -> list[MultiGraph]:
    """Every connected simple graph with at most ``max_edges`` edges, up to isomorphism.

    Built by growing edge by edge from K_2 and discarding isomorphic copies.
    """
    import networkx as nx

    seen: dict[int, list] = {}
    layer = [nx.Graph([(0, 1)])]
    out = []
    while layer:
        nxt_layer = []
        for g in layer:
            out.append(g)
            if g.number_of_edges() == max_edges:
                continue
            n = g.number_of_nodes()
            cands = [(u, v) for u in range(n) for v in range(u + 1, n) if not g.has_edge(u, v)]
            cands += [(u, n) for u in range(n)]
            for u, v in cands:
                h = g.copy()
                h.add_edge(u, v)
                key = h.number_of_edges()
                bucket = seen.setdefault(key, [])
                if any(nx.faster_could_be_isomorphic(h, k) and nx.is_isomorphic(h, k) for k in bucket):
                    continue
                bucket.append(h)
                nxt_layer.append(h)
        layer = nxt_layer
    return [MultiGraph.from_edges(g.number_of_nodes(), sorted(g.edges())) for g in out]
