"""Host multigraphs, orientations, cuts and connectivity queries.

Edges carry stable integer ids that survive subgraph extraction, so every
stage of the pipeline can refer back to the same host edge.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import numpy as np

from . import flow
from .errors import GraphParseError, PreconditionError

EdgeSet = frozenset  # set of host edge ids


class MultiGraph:
    """Loopless multigraph on vertices ``0..n-1`` with stable edge ids.

    ``ends`` maps edge id -> (u, v).  Instances are treated as immutable;
    every "mutation" helper returns a new graph sharing edge ids.
    """

    __slots__ = ("n", "ends", "inc", "labels")

    def __init__(self, n: int, ends: Mapping[int, tuple[int, int]], labels: list | None = None):
        self.n = int(n)
        self.ends: dict[int, tuple[int, int]] = dict(ends)
        self.labels = list(labels) if labels is not None else list(range(self.n))
        inc: list[list[int]] = [[] for _ in range(self.n)]
        for e in sorted(self.ends):
            u, v = self.ends[e]
            if u == v:
                raise PreconditionError(f"loop edge {e} at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise PreconditionError(f"edge {e} references a vertex outside 0..{self.n - 1}")
            inc[u].append(e)
            inc[v].append(e)
        self.inc = inc

    @classmethod
    def from_edges(cls, n: int, pairs: Iterable[tuple[int, int]], labels=None) -> "MultiGraph":
        return cls(n, {i: (int(u), int(v)) for i, (u, v) in enumerate(pairs)}, labels)

    # -- basic queries -----------------------------------------------------
    @property
    def m(self) -> int:
        return len(self.ends)

    def edge_ids(self) -> list[int]:
        return sorted(self.ends)

    def edges(self) -> Iterator[tuple[int, int, int]]:
        for e in sorted(self.ends):
            u, v = self.ends[e]
            yield e, u, v

    def degree(self, v: int) -> int:
        return len(self.inc[v])

    def degrees(self) -> np.ndarray:
        return np.array([len(lst) for lst in self.inc], dtype=np.int64)

    def min_degree(self) -> int:
        return int(min((len(lst) for lst in self.inc), default=0))

    def max_degree(self) -> int:
        return int(max((len(lst) for lst in self.inc), default=0))

    def other(self, e: int, v: int) -> int:
        u, w = self.ends[e]
        return w if u == v else u

    def neighbors(self, v: int) -> list[int]:
        return [self.other(e, v) for e in self.inc[v]]

    def support(self) -> list[int]:
        """Vertices of positive degree."""
        return [v for v in range(self.n) if self.inc[v]]

    def is_eulerian(self) -> bool:
        """All degrees even and all edges in one component."""
        if any(len(lst) % 2 for lst in self.inc):
            return False
        return len([c for c in self.components() if len(c) > 1 or self.inc[c[0]]]) <= 1

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            stack, comp = [s], []
            while stack:
                u = stack.pop()
                comp.append(u)
                for e in self.inc[u]:
                    w = self.other(e, u)
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    # -- derived graphs ----------------------------------------------------
    def subgraph(self, edge_ids: Iterable[int]) -> "MultiGraph":
        """Spanning subgraph on the given edge ids (ids are preserved)."""
        return MultiGraph(self.n, {e: self.ends[e] for e in edge_ids}, self.labels)

    def without(self, edge_ids: Iterable[int]) -> "MultiGraph":
        drop = set(edge_ids)
        return MultiGraph(self.n, {e: uv for e, uv in self.ends.items() if e not in drop}, self.labels)

    def union(self, other: "MultiGraph") -> "MultiGraph":
        ends = dict(self.ends)
        for e, uv in other.ends.items():
            if e in ends and ends[e] != uv:
                raise ValueError(f"edge id {e} has different endpoints in the two graphs")
            ends[e] = uv
        return MultiGraph(self.n, ends, self.labels)

    def edge_set(self) -> EdgeSet:
        return frozenset(self.ends)

    def pair_counts(self) -> dict[tuple[int, int], int]:
        counts: dict[tuple[int, int], int] = defaultdict(int)
        for u, v in self.ends.values():
            counts[(min(u, v), max(u, v))] += 1
        return dict(counts)

    def __repr__(self) -> str:
        return f"MultiGraph(n={self.n}, m={self.m})"


@dataclass
class Orientation:
    """Choice of a head endpoint for every edge of ``graph``."""

    graph: MultiGraph
    heads: dict[int, int]

    def head(self, e: int) -> int:
        return self.heads[e]

    def tail(self, e: int) -> int:
        return self.graph.other(e, self.heads[e])

    def arcs(self) -> list[tuple[int, int, int]]:
        """(edge id, tail, head) triples in edge-id order."""
        return [(e, self.tail(e), self.heads[e]) for e in sorted(self.heads)]

    def out_edges(self, v: int) -> list[int]:
        return [e for e in self.graph.inc[v] if self.heads[e] != v]

    def in_edges(self, v: int) -> list[int]:
        return [e for e in self.graph.inc[v] if self.heads[e] == v]

    def out_degree(self, v: int) -> int:
        return sum(1 for e in self.graph.inc[v] if self.heads[e] != v)

    def in_degree(self, v: int) -> int:
        return sum(1 for e in self.graph.inc[v] if self.heads[e] == v)

    def imbalance(self) -> np.ndarray:
        """out-degree minus in-degree per vertex."""
        out = np.zeros(self.graph.n, dtype=np.int64)
        for e, h in self.heads.items():
            out[self.graph.other(e, h)] += 1
            out[h] -= 1
        return out

    def is_balanced(self) -> bool:
        return bool(np.all(np.abs(self.imbalance()) <= 1))

    def reverse(self, edge_ids: Iterable[int]) -> None:
        for e in edge_ids:
            self.heads[e] = self.tail(e)

    def copy(self) -> "Orientation":
        return Orientation(self.graph, dict(self.heads))


@dataclass
class Cut:
    """Bipartition of the vertex set with its crossing edges."""

    side: list[int]  # 0 or 1 per vertex
    cross: EdgeSet
    connectivity: int | None = None  # edge connectivity of (V, cross)
    flips: int = 0

    @property
    def parts(self) -> tuple[list[int], list[int]]:
        return ([v for v, s in enumerate(self.side) if s == 0],
                [v for v, s in enumerate(self.side) if s == 1])


# ---------------------------------------------------------------------------
# edge-list text format
# ---------------------------------------------------------------------------

def load_graph(text: str) -> MultiGraph:
    """Parse the ``n m`` header + ``u v`` lines edge-list format.

    Labels below ``n`` map to themselves.  Otherwise the used labels are
    renumbered densely in sorted order; the originals stay on ``labels``.
    """
    header = None
    pairs: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphParseError(f"expected two integers, got {line!r}", lineno)
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(f"non-integer token in {line!r}", lineno) from None
        if a < 0 or b < 0:
            raise GraphParseError("negative value", lineno)
        if header is None:
            header = (a, b)
            continue
        if a == b:
            raise GraphParseError(f"loop edge at vertex {a}", lineno)
        pairs.append((a, b, lineno))
    if header is None:
        raise GraphParseError("missing 'n m' header", 1)
    n, m = header
    if len(pairs) != m:
        raise GraphParseError(f"header announces {m} edges but {len(pairs)} were given")
    used = sorted({x for a, b, _ in pairs for x in (a, b)})
    if not used or used[-1] < n:
        labels = list(range(n))
    else:
        if len(used) > n:
            raise GraphParseError(f"{len(used)} distinct vertex labels exceed n={n}")
        taken = set(used)
        fillers = (x for x in range(n + len(used)) if x not in taken)
        labels = used + [next(fillers) for _ in range(n - len(used))]
    index = {lab: i for i, lab in enumerate(labels)}
    return MultiGraph.from_edges(n, ((index[a], index[b]) for a, b, _ in pairs), labels)


def dump_graph(G: MultiGraph) -> str:
    lines = [f"{G.n} {G.m}"]
    for _, u, v in G.edges():
        lines.append(f"{G.labels[u]} {G.labels[v]}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# connectivity
# ---------------------------------------------------------------------------

def edge_connectivity(G: MultiGraph) -> int:
    """Global minimum edge cut value (0 when disconnected)."""
    if G.n <= 1:
        return 0
    if not G.is_connected():
        return 0
    cap = flow.capacity_matrix(G.n, flow.undirected_arcs(G.ends.values()))
    vals = flow.rooted_connectivity(cap, 0)
    return int(vals[1:].min())


def locally_max_cut(G: MultiGraph, seed=None, max_rounds: int = 10_000) -> Cut:
    """Single-vertex-flip local search for a maximum cut.

    At a local optimum every vertex has at least half its edges across
    the cut.  The edge connectivity of the crossing graph is reported.
    """
    rng = random.Random(seed)
    side = [rng.randrange(2) for _ in range(G.n)]
    cross_deg = [0] * G.n
    for u, v in G.ends.values():
        if side[u] != side[v]:
            cross_deg[u] += 1
            cross_deg[v] += 1
    order = list(range(G.n))
    flips = 0
    for _ in range(max_rounds):
        rng.shuffle(order)
        improved = False
        for v in order:
            d = G.degree(v)
            if 2 * cross_deg[v] < d:
                side[v] ^= 1
                flips += 1
                cross_deg[v] = d - cross_deg[v]
                for e in G.inc[v]:
                    w = G.other(e, v)
                    if side[w] != side[v]:
                        cross_deg[w] += 1
                    else:
                        cross_deg[w] -= 1
                improved = True
        if not improved:
            break
    cross = frozenset(e for e, (u, v) in G.ends.items() if side[u] != side[v])
    cut = Cut(side=side, cross=cross, flips=flips)
    cut.connectivity = edge_connectivity(G.subgraph(cross))
    return cut


def induced_cross_graph(G: MultiGraph, cut: Cut) -> MultiGraph:
    """The spanning subgraph formed by the crossing edges of ``cut``."""
    side = cut.side
    return G.subgraph(e for e, (u, v) in G.ends.items() if side[u] != side[v])


def is_strongly_connected(n: int, arcs: Iterable[tuple[int, int]], vertices: Iterable[int] | None = None) -> bool:
    verts = list(range(n)) if vertices is None else list(vertices)
    if len(verts) <= 1:
        return True
    fwd: dict[int, list[int]] = defaultdict(list)
    bwd: dict[int, list[int]] = defaultdict(list)
    for a, b in arcs:
        fwd[a].append(b)
        bwd[b].append(a)
    for adj in (fwd, bwd):
        seen = {verts[0]}
        stack = [verts[0]]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if any(v not in seen for v in verts):
            return False
    return True


def find_bridge(G: MultiGraph) -> int | None:
    """Return the id of some bridge of G, or None.  Parallel edges are never bridges."""
    n = G.n
    disc = [-1] * n
    low = [0] * n
    timer = 0
    for root in range(n):
        if disc[root] != -1 or not G.inc[root]:
            continue
        disc[root] = low[root] = timer
        timer += 1
        stack = [(root, -1, iter(G.inc[root]))]
        while stack:
            u, pe, it = stack[-1]
            advanced = False
            for e in it:
                if e == pe:
                    continue
                w = G.other(e, u)
                if disc[w] == -1:
                    disc[w] = low[w] = timer
                    timer += 1
                    stack.append((w, e, iter(G.inc[w])))
                    advanced = True
                    break
                low[u] = min(low[u], disc[w])
            if advanced:
                continue
            stack.pop()
            if stack:
                p = stack[-1][0]
                low[p] = min(low[p], low[u])
                if low[u] > disc[p]:
                    return pe
    return None
