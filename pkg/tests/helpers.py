"""Shared test instances."""

import random
from collections import Counter
from fractions import Fraction

import networkx as nx

from pathdecomp.graph import MultiGraph
from pathdecomp.pathgraph import Path, PathGraph


def low_conflict_path_graph(n: int, d: int, max_len: int, bound: Fraction, seed: int, rounds: int = 4) -> PathGraph:
    """Eulerian path-graph on a random d-regular graph with conf(H) <= bound.

    Starts from single-edge paths (conf = 1/d) and merges two paths at a
    shared end whenever the merged path is simple, no longer than
    ``max_len``, and keeps conf within ``bound`` at every affected end.
    Each merge removes two path ends at one vertex, so parity is kept.
    """
    rng = random.Random(seed)
    g = nx.random_regular_graph(d, n, seed=seed)
    G = MultiGraph.from_edges(n, sorted(g.edges()))
    paths = {e: ([u, v], [e]) for e, u, v in G.edges()}
    at = {v: set() for v in range(n)}
    cnt = {v: Counter() for v in range(n)}

    def attach(i, sign):
        verts = paths[i][0]
        for end in (verts[0], verts[-1]):
            if sign > 0:
                at[end].add(i)
            else:
                at[end].discard(i)
            for w in verts:
                if w != end:
                    cnt[end][w] += sign

    for i in paths:
        attach(i, 1)
    nxt = max(paths) + 1
    for _ in range(rounds):
        order = list(range(n))
        rng.shuffle(order)
        for x in order:
            if len(at[x]) < 4:
                continue
            i, j = rng.sample(sorted(at[x]), 2)
            (pv, pe), (qv, qe) = paths[i], paths[j]
            if len(pe) + len(qe) > max_len:
                continue
            if pv[-1] != x:
                pv, pe = pv[::-1], pe[::-1]
            if qv[0] != x:
                qv, qe = qv[::-1], qe[::-1]
            if set(pv) & set(qv) != {x}:
                continue
            attach(i, -1)
            attach(j, -1)
            paths[nxt] = (pv + qv[1:], pe + qe)
            attach(nxt, 1)
            ok = all(max(cnt[v].values(), default=0) <= bound * len(at[v]) for v in (pv[0], qv[-1], x) if at[v])
            if ok:
                del paths[i], paths[j]
                nxt += 1
            else:
                attach(nxt, -1)
                del paths[nxt]
                attach(i, 1)
                attach(j, 1)
    return PathGraph(G, [Path(tuple(v), tuple(e)) for v, e in paths.values()])


def circulant_pairs(n: int, offsets) -> list[tuple[int, int]]:
    return [(i, (i + s) % n) for s in offsets for i in range(n)]


def circ(n: int, offsets) -> MultiGraph:
    return MultiGraph.from_edges(n, circulant_pairs(n, offsets))


def split_host(pairs_a, pairs_b, n: int) -> tuple[MultiGraph, MultiGraph]:
    """Two edge-disjoint subgraphs of one host, so their edge ids never clash."""
    A = MultiGraph.from_edges(n, list(pairs_a) + list(pairs_b))
    k = len(pairs_a)
    return A.subgraph(range(k)), A.without(range(k))


def degree_vector(G: MultiGraph, edges) -> list[int]:
    d = [0] * G.n
    for e in edges:
        u, v = G.ends[e]
        d[u] += 1
        d[v] += 1
    return d


ACCEPTANCE: dict[int, str] = {}


def record(num: int, ok: bool, detail: str) -> bool:
    """Log one acceptance line; the terminal summary prints them in order."""
    line = f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[num] = line
    print(line)
    return ok
