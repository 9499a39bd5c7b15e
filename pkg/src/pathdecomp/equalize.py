"""Equalizing tools: equitable colorings, fractions, orientations, arborescences."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import flow
from .errors import BudgetExhausted, InvariantViolation, PreconditionError
from .graph import MultiGraph, Orientation, edge_connectivity

# ---------------------------------------------------------------------------
# nearly equitable edge colorings
# ---------------------------------------------------------------------------


@dataclass
class EdgeColoring:
    """Improper edge coloring with colors ``1..k`` and per-vertex tallies."""

    graph: MultiGraph
    k: int
    color: dict[int, int]

    def tallies(self) -> np.ndarray:
        """``(n, k)`` array with ``d_i(v)`` in column ``i - 1``."""
        out = np.zeros((self.graph.n, self.k), dtype=np.int64)
        for e, c in self.color.items():
            u, v = self.graph.ends[e]
            out[u, c - 1] += 1
            out[v, c - 1] += 1
        return out

    def spread(self) -> int:
        """max over v, i, j of |d_i(v) - d_j(v)|."""
        t = self.tallies()
        if t.size == 0:
            return 0
        return int((t.max(axis=1) - t.min(axis=1)).max())

    def classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.k)]
        for e in sorted(self.color):
            out[self.color[e] - 1].append(e)
        return out

    def class_graph(self, i: int) -> MultiGraph:
        return self.graph.subgraph(e for e, c in self.color.items() if c == i)


def nearly_equitable_coloring(G: MultiGraph, k: int, seed=None, max_swaps: int | None = None,
                              tighten: bool = True) -> EdgeColoring:
    """Color the edges with ``k`` colors so that ``|d_i(v) - d_j(v)| <= 2``.

    Greedy start, then alternating-trail swaps: while some vertex has
    ``d_i(v) >= d_j(v) + 3`` walk a maximal trail from ``v`` alternating
    colors ``i, j, i, ...`` and swap the two colors along it.  Each swap
    strictly lowers ``sum_v sum_c d_c(v)^2``.

    With ``tighten`` the same swap is then applied at vertices with a gap
    of exactly 2 whenever the trail ends away from ``v``, which still
    lowers the potential; this often reaches a spread of 1.
    """
    if k < 1:
        raise PreconditionError("k must be at least 1")
    rng = random.Random(seed)
    if k == 1:
        return EdgeColoring(G, 1, {e: 1 for e in G.ends})
    n = G.n
    tally = [[0] * k for _ in range(n)]
    by_color: list[list[set[int]]] = [[set() for _ in range(k)] for _ in range(n)]
    color: dict[int, int] = {}
    order = G.edge_ids()
    rng.shuffle(order)
    for e in order:
        u, v = G.ends[e]
        tu, tv = tally[u], tally[v]
        best = min(range(k), key=lambda c: (max(tu[c], tv[c]), tu[c] + tv[c], rng.random()))
        color[e] = best
        tu[best] += 1
        tv[best] += 1
        by_color[u][best].add(e)
        by_color[v][best].add(e)

    def trail_from(v: int, first: int, hi: int, lo: int) -> tuple[list[int], int]:
        trail, used = [first], {first}
        cur, need = G.other(first, v), lo
        while True:
            nxt = next((e for e in by_color[cur][need] if e not in used), None)
            if nxt is None:
                return trail, cur
            used.add(nxt)
            trail.append(nxt)
            cur = G.other(nxt, cur)
            need = hi if need == lo else lo

    def swap(trail: list[int], hi: int, lo: int) -> set[int]:
        touched = set()
        for e in trail:
            old = color[e]
            new = lo if old == hi else hi
            color[e] = new
            for x in G.ends[e]:
                tally[x][old] -= 1
                tally[x][new] += 1
                by_color[x][old].discard(e)
                by_color[x][new].add(e)
                touched.add(x)
        return touched

    if max_swaps is None:
        max_swaps = 20 * (G.m + n) + 100
    swaps = 0
    for gap in ((3, 2) if tighten else (3,)):
        pending = list(range(n))
        pending_set = set(pending)
        while pending:
            v = pending.pop()
            pending_set.discard(v)
            t = tally[v]
            hi = max(range(k), key=t.__getitem__)
            lo = min(range(k), key=t.__getitem__)
            if t[hi] - t[lo] < gap:
                continue
            swaps += 1
            if swaps > max_swaps:
                raise InvariantViolation("equitable coloring exceeded its swap cap", swaps=swaps)
            if gap == 3:
                trail, _ = trail_from(v, next(iter(by_color[v][hi])), hi, lo)
            else:
                # a trail closing at v would leave the potential unchanged
                trail = None
                for first in sorted(by_color[v][hi])[:4]:
                    cand, end = trail_from(v, first, hi, lo)
                    if end != v:
                        trail = cand
                        break
                if trail is None:
                    continue
            for x in swap(trail, hi, lo) | {v}:
                if x not in pending_set:
                    pending_set.add(x)
                    pending.append(x)
    return EdgeColoring(G, k, {e: c + 1 for e, c in color.items()})


# ---------------------------------------------------------------------------
# fractions
# ---------------------------------------------------------------------------


@dataclass
class SubgraphFraction:
    """A spanning subgraph ``H`` of ``host`` whose degrees track ``alpha * d_host``."""

    host: MultiGraph
    edges: frozenset
    alpha: Fraction
    slack: Fraction  # achieved max_v |d_H(v) - alpha d_G(v)|
    stages: int = 1

    @property
    def graph(self) -> MultiGraph:
        return self.host.subgraph(self.edges)

    def complement(self) -> "SubgraphFraction":
        rest = frozenset(self.host.ends) - self.edges
        return SubgraphFraction(self.host, rest, 1 - self.alpha, measure_slack(self.host, rest, 1 - self.alpha), self.stages)


def measure_slack(G: MultiGraph, edges, alpha: Fraction) -> Fraction:
    dh = [0] * G.n
    for e in edges:
        u, v = G.ends[e]
        dh[u] += 1
        dh[v] += 1
    return max((abs(dh[v] - alpha * G.degree(v)) for v in range(G.n)), default=Fraction(0))


def k_fraction(G: MultiGraph, k: int, seed=None) -> SubgraphFraction:
    """Subgraph with ``|d_H(v) - d_G(v)/k| <= 2`` (one class of an equitable coloring)."""
    alpha = Fraction(1, k)
    if k == 1:
        return SubgraphFraction(G, frozenset(G.ends), alpha, Fraction(0))
    col = nearly_equitable_coloring(G, k, seed=seed)
    edges = frozenset(e for e, c in col.color.items() if c == 1)
    return SubgraphFraction(G, edges, alpha, measure_slack(G, edges, alpha))


def alpha_fraction(G: MultiGraph, alpha, slack_budget=2, seed=None) -> SubgraphFraction:
    """Subgraph tracking ``alpha * d_G`` built from chained ``k_fraction`` stages.

    ``alpha = 1/k + (1 - 1/k) alpha'`` with ``k = ceil(1/alpha)``: take a
    ``1/k`` fraction, then recurse on its complement.  Each stage adds at
    most 2 to the slack, so ``slack_budget`` must cover ``2 * stages``.
    """
    alpha = Fraction(alpha).limit_denominator(10_000)
    if not 0 < alpha <= 1:
        raise PreconditionError(f"alpha must lie in (0, 1], got {alpha}")
    if alpha == 1:
        return SubgraphFraction(G, frozenset(G.ends), alpha, Fraction(0), stages=0)
    plan = []
    a = alpha
    while a > 0:
        k = -(-a.denominator // a.numerator)  # ceil(1/a)
        plan.append(k)
        a = (k * a - 1) / (k - 1) if k > 1 else Fraction(0)
    if 2 * len(plan) > slack_budget:
        raise PreconditionError(f"alpha={alpha} needs {len(plan)} stages, slack budget {slack_budget} allows {int(slack_budget) // 2}")
    rng = random.Random(seed)
    chosen: set[int] = set()
    rest = G
    for k in plan:
        part = k_fraction(rest, k, seed=rng.random())
        chosen |= part.edges
        rest = rest.without(part.edges)
    edges = frozenset(chosen)
    frac = SubgraphFraction(G, edges, alpha, measure_slack(G, edges, alpha), stages=len(plan))
    if frac.slack > slack_budget:
        raise InvariantViolation(f"alpha fraction slack {frac.slack} exceeds budget {slack_budget}")
    return frac


def split_fractions(G: MultiGraph, alphas, seed=None) -> list[frozenset]:
    """Edge-disjoint subgraphs ``H_i`` of G, each an ``alphas[i]``-fraction of G.

    The final remainder is not returned; ``sum(alphas)`` must be <= 1.
    """
    alphas = [Fraction(a).limit_denominator(10_000) for a in alphas]
    if sum(alphas) > 1:
        raise PreconditionError(f"fractions sum to {sum(alphas)} > 1")
    rng = random.Random(seed)
    out = []
    rest, left = G, Fraction(1)
    for a in alphas:
        if a == 0:
            out.append(frozenset())
            continue
        rel = a / left
        part = alpha_fraction(rest, rel, slack_budget=2 * 64, seed=rng.random()) if rel < 1 else None
        edges = part.edges if part is not None else frozenset(rest.ends)
        out.append(edges)
        rest = rest.without(edges)
        left -= a
    return out


# ---------------------------------------------------------------------------
# orientations
# ---------------------------------------------------------------------------


def _euler_orient(n: int, ends: dict[int, tuple[int, int]], rng: random.Random | None) -> dict[int, int]:
    """Orient every edge along Euler circuits of an all-even multigraph."""
    adj: list[list[int]] = [[] for _ in range(n)]
    for e in sorted(ends):
        u, v = ends[e]
        adj[u].append(e)
        adj[v].append(e)
    if rng is not None:
        for lst in adj:
            rng.shuffle(lst)
    ptr = [0] * n
    used: set[int] = set()
    heads: dict[int, int] = {}
    starts = range(n) if rng is None else rng.sample(range(n), n)
    for s in starts:
        stack = [s]
        while stack:
            v = stack[-1]
            lst = adj[v]
            while ptr[v] < len(lst) and lst[ptr[v]] in used:
                ptr[v] += 1
            if ptr[v] == len(lst):
                stack.pop()
                continue
            e = lst[ptr[v]]
            used.add(e)
            a, b = ends[e]
            w = b if a == v else a
            heads[e] = w
            stack.append(w)
    return heads


def balanced_orientation(G: MultiGraph, seed=None) -> Orientation:
    """Orientation with ``|d+(v) - d-(v)| <= 1`` everywhere.

    Odd-degree vertices of each component are paired by virtual edges,
    the augmented graph is oriented along Euler circuits and the virtual
    edges are dropped.  ``seed=None`` gives the deterministic variant.
    """
    rng = random.Random(seed) if seed is not None else None
    ends = dict(G.ends)
    virtual = -1
    for comp in G.components():
        odd = [v for v in comp if G.degree(v) % 2]
        if rng is not None:
            rng.shuffle(odd)
        for a, b in zip(odd[::2], odd[1::2]):
            ends[virtual] = (a, b)
            virtual -= 1
    heads = _euler_orient(G.n, ends, rng)
    return Orientation(G, {e: h for e, h in heads.items() if e >= 0})


def _arcs(D: Orientation) -> list[tuple[int, int]]:
    return [(t, h) for _, t, h in D.arcs()]


def arc_strength(D: Orientation, root: int = 0) -> tuple[int, int, int, str]:
    """min over v of lambda(root->v) and lambda(v->root).

    Returns ``(value, witness vertex, root, direction)`` where direction
    is ``"out"`` for a root->v bottleneck and ``"in"`` otherwise.
    """
    n = D.graph.n
    if n <= 1:
        return 0, root, root, "out"
    cap = flow.capacity_matrix(n, _arcs(D))
    outv = flow.rooted_connectivity(cap, root)
    inv = flow.rooted_connectivity(cap, root, inbound=True)
    outv[root] = inv[root] = np.iinfo(np.int64).max
    a, b = int(np.argmin(outv)), int(np.argmin(inv))
    if outv[a] <= inv[b]:
        return int(outv[a]), a, root, "out"
    return int(inv[b]), b, root, "in"


def is_k_arc_strong(D: Orientation, k: int, root: int = 0) -> bool:
    return arc_strength(D, root)[0] >= k


def _repair_path(D: Orientation, sources: set[int], targets: set[int]) -> list[int] | None:
    """Edge ids of a directed path from some source to some target."""
    G = D.graph
    prev: dict[int, tuple[int, int] | None] = {s: None for s in sources}
    frontier = sorted(sources)
    while frontier:
        nxt = []
        for u in frontier:
            for e in G.inc[u]:
                if D.heads[e] == u:
                    continue
                w = D.heads[e]
                if w in prev:
                    continue
                prev[w] = (u, e)
                if w in targets:
                    path = []
                    x = w
                    while prev[x] is not None:
                        p, pe = prev[x]
                        path.append(pe)
                        x = p
                    return path[::-1]
                nxt.append(w)
        frontier = nxt
    return None


def balanced_arc_strong(G: MultiGraph, k: int, budget: int = 200, seed=None, root: int = 0,
                        check_precondition: bool = True) -> Orientation:
    """Balanced orientation that is certified ``k``-arc-strong.

    Starts from a random balanced orientation.  While some cut ``X`` has
    fewer than ``k`` entering (or leaving) arcs, reverse a directed path
    between a surplus and a deficit vertex on opposite sides; the flip
    keeps ``|d+ - d-| <= 1`` and raises the deficient side by one.
    """
    if check_precondition:
        lam = edge_connectivity(G)
        if lam < 2 * k:
            raise PreconditionError(f"graph is {lam}-edge-connected; a {k}-arc-strong orientation needs {2 * k}",
                                    edge_connectivity=lam, k=k)
    rng = random.Random(seed)
    n = G.n
    D = balanced_orientation(G, seed=rng.random())
    for it in range(budget):
        cap = flow.capacity_matrix(n, _arcs(D))
        bad = None
        for v in range(n):
            if v == root:
                continue
            val, X = flow.sink_side(cap, root, v)
            if val < k:
                bad = ("in", X)
                break
            rcap = cap.T.tocsr()
            rcap.sort_indices()
            val, X = flow.sink_side(rcap, root, v)
            if val < k:
                bad = ("out", X)
                break
        if bad is None:
            return D
        kind, X = bad
        imb = D.imbalance()
        inside = {v for v in X}
        outside = set(range(n)) - inside
        if kind == "in":
            # too few arcs enter X: flip a path from a surplus vertex in X to a deficit vertex outside
            path = _repair_path(D, {v for v in inside if imb[v] > 0}, {v for v in outside if imb[v] < 0})
        else:
            path = _repair_path(D, {v for v in outside if imb[v] > 0}, {v for v in inside if imb[v] < 0})
        if path is None:
            D = balanced_orientation(G, seed=rng.random())
            continue
        D.reverse(path)
    raise BudgetExhausted(f"no certified {k}-arc-strong balanced orientation within {budget} repairs", k=k)


# ---------------------------------------------------------------------------
# arborescence packing
# ---------------------------------------------------------------------------


@dataclass
class Arborescence:
    """Spanning out-arborescence: ``entering[v]`` is the arc (edge id) into v."""

    root: int
    entering: dict[int, int]
    arc_ends: dict[int, tuple[int, int]]  # edge id -> (tail, head)

    def edge_ids(self) -> set[int]:
        return set(self.entering.values())

    def violations(self, n: int) -> list[str]:
        out = []
        if self.root in self.entering:
            out.append("root has an entering arc")
        missing = [v for v in range(n) if v != self.root and v not in self.entering]
        if missing:
            out.append(f"not spanning: {missing[:5]}")
        for v, e in self.entering.items():
            if self.arc_ends[e][1] != v:
                out.append(f"arc {e} does not enter {v}")
        for v in self.entering:
            seen = set()
            x = v
            while x != self.root:
                if x in seen or x not in self.entering:
                    out.append(f"vertex {v} does not reach the root")
                    break
                seen.add(x)
                x = self.arc_ends[self.entering[x]][0]
        return out


def _all_reach(n: int, arcs: list[tuple[int, int]], root: int, need: int) -> bool:
    if need <= 0:
        return True
    cap = flow.capacity_matrix(n, arcs)
    for v in range(n):
        if v != root and flow.flow_value(cap, root, v) < need:
            return False
    return True


def pack_arborescences(D: Orientation, z: int, k: int, seed=None) -> list[Arborescence]:
    """``k`` arc-disjoint spanning out-arborescences rooted at ``z``.

    Arborescences are grown one at a time.  An arc leaving the current
    vertex set is admitted only if afterwards every vertex still receives
    ``k - i`` arc-disjoint paths from ``z`` in the unused arcs.  Candidate
    arcs are tested in batches; the first inadmissible one is located by
    bisection, which is sound because admissibility is monotone.
    """
    G = D.graph
    n = G.n
    arc_ends = {e: (t, h) for e, t, h in D.arcs()}
    remaining = set(arc_ends)

    def arcs_of(ids):
        return [arc_ends[e] for e in sorted(ids)]

    cap = flow.capacity_matrix(n, arcs_of(remaining))
    for v in range(n):
        if v == z:
            continue
        val, X = flow.sink_side(cap, z, v)
        if val < k:
            raise PreconditionError(f"only {val} arc-disjoint paths from {z} to {v}; need {k}",
                                    vertex=v, cut=sorted(X), value=val)
    rng = random.Random(seed)
    out: list[Arborescence] = []
    for i in range(k):
        need = k - i - 1
        committed: list[int] = []
        rejected: set[int] = set()
        while True:
            in_tree = {z} | {arc_ends[e][1] for e in committed}
            cand = list(committed)
            frontier = sorted(in_tree)
            rng.shuffle(frontier)
            avail = remaining - rejected - set(committed)
            out_arcs: dict[int, list[int]] = {}
            for e in sorted(avail):
                out_arcs.setdefault(arc_ends[e][0], []).append(e)
            for lst in out_arcs.values():
                rng.shuffle(lst)
            queue = list(frontier)
            qi = 0
            while qi < len(queue):
                u = queue[qi]
                qi += 1
                for e in out_arcs.get(u, ()):
                    h = arc_ends[e][1]
                    if h not in in_tree:
                        in_tree.add(h)
                        cand.append(e)
                        queue.append(h)
            if len(in_tree) < n:
                raise InvariantViolation("arborescence growth got stuck; no admissible arc", tree=i,
                                         spanned=len(in_tree))
            if _all_reach(n, arcs_of(remaining - set(cand)), z, need):
                committed = cand
                break
            lo, hi = len(committed), len(cand)
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if _all_reach(n, arcs_of(remaining - set(cand[:mid])), z, need):
                    lo = mid
                else:
                    hi = mid
            committed = cand[:lo]
            rejected.add(cand[hi - 1])
        entering = {arc_ends[e][1]: e for e in committed}
        out.append(Arborescence(z, entering, {e: arc_ends[e] for e in committed}))
        remaining -= set(committed)
    return out
