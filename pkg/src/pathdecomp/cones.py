"""Rainbow path extraction through cones, and the (ell, ell+1) decomposition.

An ell-edge-colored graph is oriented color by color.  At every vertex the
in-edges of color i are grouped into half cones and matched at random with
out-edges of color i+1; following the matchings splits the edges into
walks colored 1, 2, ..., ell.  Walks that are simple paths form the
path-graph, the rest go to the remainder.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import maximum_bipartite_matching

from .equalize import EdgeColoring, alpha_fraction, balanced_orientation, nearly_equitable_coloring
from .errors import BudgetExhausted, DecompositionError, InvariantViolation, PreconditionError
from .graph import MultiGraph
from .pathgraph import OrientedPathGraph, Path, PathGraph, orient_paths_balanced


@dataclass
class ConeParams:
    """Knobs for cone-based extraction; ``None`` means derive from the graph."""

    c: int | None = None
    b: int | None = None
    budget: int = 40
    min_degree: int = 0
    strict_degree: bool = False  # enforce per-color degree > c(c-2)
    attempts: int = 4  # fresh-seed retries when verification is strict


def default_c(G: MultiGraph) -> int:
    return max(3, math.ceil(math.sqrt(max(G.min_degree(), 1))))


def default_b(c: int) -> int:
    return max(1, math.ceil(c ** (2 / 3)))


def half_cone_sizes(n: int, c: int) -> tuple[list[int], bool]:
    """Block sizes for ``n`` edges: ``r = n mod (c-1)`` blocks of size c, the rest c-1.

    This needs ``r <= n // (c-1)``.  Below that range the edges are split
    into ``ceil(n/c)`` near-equal blocks instead; the flag reports it.
    """
    if n == 0:
        return [], False
    q, r = divmod(n, c - 1)
    if 0 < q and r <= q:
        return [c] * r + [c - 1] * (q - r), False
    k = -(-n // c)
    base, extra = divmod(n, k)
    return [base + 1] * extra + [base] * (k - extra), True


@dataclass
class Cone:
    """Matching unit at ``center``.

    ``kind`` is ``"pair"`` for an i-cone (in-edges of color i against
    out-edges of color i+1), ``"first"`` for a lone half cone of color-1
    out-edges and ``"last"`` for a lone half cone of color-ell in-edges.
    """

    id: int
    center: int
    color: int
    kind: str
    minus: tuple[int, ...]
    plus: tuple[int, ...]

    @property
    def size(self) -> int:
        return max(len(self.minus), len(self.plus))


@dataclass
class ConeSystem:
    host: MultiGraph
    ell: int
    c: int
    b: int
    coloring: EdgeColoring
    arcs: dict[int, tuple[int, int, int]]  # edge id -> (tail, head, color); dummy ids < 0
    cones: list[Cone]
    r: dict[tuple[int, int], int]
    fallback_blocks: int = 0

    @property
    def v0(self) -> int:
        return self.host.n

    def dummy_ids(self) -> list[int]:
        return [e for e in self.arcs if e < 0]

    def in_edges(self, v: int, i: int) -> list[int]:
        return [e for e, (t, h, c) in self.arcs.items() if h == v and c == i]

    def out_edges(self, v: int, i: int) -> list[int]:
        return [e for e, (t, h, c) in self.arcs.items() if t == v and c == i]

    def violations(self) -> list[str]:
        out = []
        n = self.host.n
        minus: dict[tuple[int, int], int] = Counter()
        plus: dict[tuple[int, int], int] = Counter()
        for e, (t, h, col) in self.arcs.items():
            if h < n:
                minus[(h, col)] += 1
            if t < n:
                plus[(t, col)] += 1
        for v in range(n):
            for i in range(1, self.ell):
                if minus[(v, i)] != plus[(v, i + 1)]:
                    out.append(f"|E_{i}^-({v})| != |E_{i + 1}^+({v})|")
        for cone in self.cones:
            if cone.center == self.v0:
                out.append(f"cone {cone.id} at the dummy vertex")
            if cone.kind == "pair" and len(cone.minus) != len(cone.plus):
                out.append(f"cone {cone.id} has unequal halves")
        return out


def mismatch(n: int, ell: int, arcs: dict[int, tuple[int, int, int]]) -> int:
    """Number of dummy edges needed: sum over v, i of | |E_i^-(v)| - |E_{i+1}^+(v)| |."""
    ins, outs = Counter(), Counter()
    for t, h, col in arcs.values():
        ins[(h, col)] += 1
        outs[(t, col)] += 1
    return sum(abs(ins[(v, i)] - outs[(v, i + 1)]) for v in range(n) for i in range(1, ell))


def match_color_orientations(n: int, ell: int, arcs: dict[int, tuple[int, int, int]]) -> int:
    """Lower the dummy-edge count by reversing directed paths inside color classes.

    Reversing a path of color i from a vertex with one surplus out-arc to
    a vertex with one surplus in-arc keeps every class balanced and only
    changes the in/out counts at the two ends.  A flip is taken only when
    it lowers the mismatch, so the loop terminates.  Returns the number of
    flips.
    """
    ins, outs = Counter(), Counter()
    out_arcs: dict[tuple[int, int], set[int]] = {}
    for e, (t, h, col) in arcs.items():
        ins[(h, col)] += 1
        outs[(t, col)] += 1
        out_arcs.setdefault((t, col), set()).add(e)

    def local(v: int) -> int:
        return sum(abs(ins[(v, i)] - outs[(v, i + 1)]) for i in range(1, ell))

    def delta(v: int, col: int, sign: int) -> int:
        # sign=+1: v loses an out-arc and gains an in-arc of this color
        before = local(v)
        outs[(v, col)] -= sign
        ins[(v, col)] += sign
        after = local(v)
        outs[(v, col)] += sign
        ins[(v, col)] -= sign
        return after - before

    def find_path(col: int, sources: set[int], targets: set[int]) -> list[int] | None:
        prev: dict[int, int | None] = {s: None for s in sources}
        frontier = sorted(sources)
        while frontier:
            nxt = []
            for u in frontier:
                for e in sorted(out_arcs.get((u, col), ())):
                    w = arcs[e][1]
                    if w in prev:
                        continue
                    prev[w] = e
                    if w in targets:
                        path = []
                        while prev[w] is not None:
                            path.append(prev[w])
                            w = arcs[prev[w]][0]
                        return path
                    nxt.append(w)
            frontier = nxt
        return None

    flips = 0
    improved = True
    while improved:
        improved = False
        for col in range(1, ell + 1):
            while True:
                surplus = [v for v in range(n) if outs[(v, col)] - ins[(v, col)] == 1]
                deficit = [v for v in range(n) if ins[(v, col)] - outs[(v, col)] == 1]
                ds = {v: delta(v, col, 1) for v in surplus}
                dd = {v: delta(v, col, -1) for v in deficit}
                path = None
                for need_s, need_d in ((-1, 0), (0, -1)):
                    S = {v for v, g in ds.items() if g <= need_s}
                    T = {v for v, g in dd.items() if g <= need_d}
                    if S and T:
                        path = find_path(col, S, T)
                        if path:
                            break
                if not path:
                    break
                for e in path:
                    t, h, c = arcs[e]
                    arcs[e] = (h, t, c)
                    out_arcs[(t, c)].discard(e)
                    out_arcs.setdefault((h, c), set()).add(e)
                a, b = arcs[path[-1]][1], arcs[path[0]][0]  # old tail of first arc, old head of last
                outs[(a, col)] -= 1
                ins[(a, col)] += 1
                ins[(b, col)] -= 1
                outs[(b, col)] += 1
                flips += 1
                improved = True
    return flips


def build_cone_system(G: MultiGraph, ell: int, c: int | None = None, b: int | None = None, seed=None,
                      strict_degree: bool = False) -> ConeSystem:
    """Color, orient, equalize with dummy edges and cut everything into cones."""
    if ell < 2:
        raise PreconditionError("cones need ell >= 2")
    c = default_c(G) if c is None else c
    if c < 3:
        raise PreconditionError("cone size c must be at least 3")
    b = default_b(c) if b is None else b
    rng = random.Random(seed)
    coloring = nearly_equitable_coloring(G, ell, seed=rng.random())
    if strict_degree:
        tallies = coloring.tallies()
        for v in range(G.n):
            for i in range(ell):
                if tallies[v, i] <= c * (c - 2):
                    raise PreconditionError(f"vertex {v} has degree {tallies[v, i]} in color {i + 1}; need > {c * (c - 2)}",
                                            vertex=v, color=i + 1)
    arcs: dict[int, tuple[int, int, int]] = {}
    for i in range(1, ell + 1):
        cls = coloring.class_graph(i)
        D = balanced_orientation(cls, seed=rng.random())
        for e, t, h in D.arcs():
            arcs[e] = (t, h, i)
    match_color_orientations(G.n, ell, arcs)

    n = G.n
    v0 = n
    minus: dict[tuple[int, int], list[int]] = {}
    plus: dict[tuple[int, int], list[int]] = {}
    for e in sorted(arcs):
        t, h, col = arcs[e]
        minus.setdefault((h, col), []).append(e)
        plus.setdefault((t, col), []).append(e)
    dummy = -1
    for v in range(n):
        for i in range(1, ell):
            k = len(minus.get((v, i), ())) - len(plus.get((v, i + 1), ()))
            for _ in range(abs(k)):
                if k > 0:
                    arcs[dummy] = (v, v0, i + 1)
                    plus.setdefault((v, i + 1), []).append(dummy)
                else:
                    arcs[dummy] = (v0, v, i)
                    minus.setdefault((v, i), []).append(dummy)
                dummy -= 1

    cones: list[Cone] = []
    r: dict[tuple[int, int], int] = {}
    fallback = 0

    def blocks(edges: list[int], sizes: list[int]) -> list[tuple[int, ...]]:
        edges = list(edges)
        rng.shuffle(edges)
        out, pos = [], 0
        for s in sizes:
            out.append(tuple(edges[pos:pos + s]))
            pos += s
        return out

    for v in range(n):
        for i in range(1, ell + 1):
            if i < ell:
                ins = minus.get((v, i), [])
                outs = plus.get((v, i + 1), [])
                sizes, fb = half_cone_sizes(len(ins), c)
                fallback += fb
                r[(v, i)] = len(ins) % (c - 1)
                sizes.sort(reverse=True)
                for lo, hi in zip(blocks(ins, sizes), blocks(outs, sizes)):
                    cones.append(Cone(len(cones), v, i, "pair", lo, hi))
            if i == 1:
                firsts = plus.get((v, 1), [])
                sizes, fb = half_cone_sizes(len(firsts), c)
                fallback += fb
                for blk in blocks(firsts, sizes):
                    cones.append(Cone(len(cones), v, 1, "first", (), blk))
            if i == ell:
                lasts = minus.get((v, ell), [])
                sizes, fb = half_cone_sizes(len(lasts), c)
                fallback += fb
                for blk in blocks(lasts, sizes):
                    cones.append(Cone(len(cones), v, ell, "last", blk, ()))
    cs = ConeSystem(G, ell, c, b, coloring, arcs, cones, r, fallback)
    bad = cs.violations()
    if bad:
        raise InvariantViolation(f"cone system invalid: {bad[:3]}")
    return cs


@dataclass
class Walk:
    edges: tuple[int, ...]  # real edges only, in walk order
    verts: tuple[int, ...]
    short: bool
    cones: tuple[int, ...]

    @property
    def kind(self) -> str:
        if self.short:
            return "short"
        return "path" if len(set(self.verts)) == len(self.verts) else "bad"


@dataclass
class WalkDecomposition:
    system: ConeSystem
    walks: list[Walk]

    def by_kind(self, kind: str) -> list[Walk]:
        return [w for w in self.walks if w.kind == kind]

    def covers_exactly(self) -> bool:
        used = Counter(e for w in self.walks for e in w.edges)
        return set(used) == set(self.system.host.ends) and all(c == 1 for c in used.values())


def _cone_perm(seed, cone: Cone, version: int) -> list[int]:
    rng = random.Random(f"{seed}:{cone.id}:{version}")
    perm = list(range(len(cone.plus)))
    rng.shuffle(perm)
    return perm


def _trace(cs: ConeSystem, perms: dict[int, list[int]]) -> WalkDecomposition:
    nxt: dict[int, int] = {}
    via: dict[int, int] = {}  # edge -> cone joining it to its successor
    has_prev: set[int] = set()
    first_cone: dict[int, int] = {}
    last_cone: dict[int, int] = {}
    for cone in cs.cones:
        if cone.kind == "pair":
            perm = perms[cone.id]
            for k, e in enumerate(cone.minus):
                f = cone.plus[perm[k]]
                nxt[e] = f
                via[e] = cone.id
                has_prev.add(f)
        elif cone.kind == "first":
            for e in cone.plus:
                first_cone[e] = cone.id
        else:
            for e in cone.minus:
                last_cone[e] = cone.id
    walks = []
    for e in sorted(cs.arcs, key=lambda x: (x < 0, abs(x))):
        if e in has_prev:
            continue
        chain = [e]
        while chain[-1] in nxt:
            chain.append(nxt[chain[-1]])
        real = [x for x in chain if x >= 0]
        if not real:
            continue
        cones = [via[x] for x in chain[:-1]]
        if real[0] in first_cone:
            cones.insert(0, first_cone[real[0]])
        if real[-1] in last_cone:
            cones.append(last_cone[real[-1]])
        verts = [cs.arcs[real[0]][0]] + [cs.arcs[x][1] for x in real]
        walks.append(Walk(tuple(real), tuple(verts), len(real) != len(chain), tuple(cones)))
    return WalkDecomposition(cs, walks)


def sample_and_classify(cs: ConeSystem, seed=None) -> WalkDecomposition:
    """Match every cone by an independent uniform permutation and trace the walks."""
    perms = {cone.id: _cone_perm(seed, cone, 0) for cone in cs.cones if cone.kind == "pair"}
    return _trace(cs, perms)


@dataclass
class ConeEvents:
    cone: int
    center: int
    size: int
    walks: int
    bad: int
    short: int
    max_multiplicity: int
    A: bool
    B: bool
    B0: bool

    @property
    def flagged(self) -> bool:
        return self.A or self.B or self.B0


@dataclass
class EventReport:
    cones: list[ConeEvents]
    rounds: int = 0
    restarts: int = 0
    vertex_flags: list[int] = field(default_factory=list)

    def flagged(self) -> list[int]:
        return [ev.cone for ev in self.cones if ev.flagged]

    @property
    def clear(self) -> bool:
        return not self.flagged()

    def csv_rows(self) -> list[list]:
        rows = [["cone", "center", "size", "walks", "bad", "short", "max_multiplicity", "A", "B", "B0"]]
        for ev in self.cones:
            rows.append([ev.cone, ev.center, ev.size, ev.walks, ev.bad, ev.short, ev.max_multiplicity,
                         int(ev.A), int(ev.B), int(ev.B0)])
        return rows


def classify_events(wd: WalkDecomposition) -> EventReport:
    cs = wd.system
    ell, b = cs.ell, cs.b
    through: dict[int, list[Walk]] = {}
    for w in wd.walks:
        for cid in set(w.cones):
            through.setdefault(cid, []).append(w)
    out = []
    for cone in cs.cones:
        ws = through.get(cone.id, [])
        bad = sum(1 for w in ws if w.kind == "bad")
        short = sum(1 for w in ws if w.short)
        mult = Counter(u for w in ws for u in set(w.verts) if u != cone.center)
        top = max(mult.values(), default=0)
        out.append(ConeEvents(cone.id, cone.center, cone.size, len(ws), bad, short, top,
                              bad > ell * ell * b, top > ell * b, short > ell * b))
    return EventReport(out)


def vertex_events(wd: WalkDecomposition, eps: float) -> list[int]:
    """Vertices where the path-graph misses its degree, conflict or remainder bound."""
    cs = wd.system
    G, ell = cs.host, cs.ell
    at: dict[int, list[Walk]] = {}
    dR = Counter()
    for w in wd.walks:
        if w.kind == "path":
            at.setdefault(w.verts[0], []).append(w)
            at.setdefault(w.verts[-1], []).append(w)
        else:
            for e in w.edges:
                dR.update(G.ends[e])
    out = []
    for v in range(G.n):
        d = G.degree(v)
        if d == 0:
            continue
        ws = at.get(v, [])
        dh = len(ws)
        mult = Counter(u for w in ws for u in w.verts if u != v)
        if (not (1 - eps) / ell * d <= dh <= (1 + eps) / ell * d or dR[v] > eps * dh
                or max(mult.values(), default=0) > eps * dh):
            out.append(v)
    return out


def resample_until_clear(cs: ConeSystem, budget: int = 40, seed=None, eps: float | None = None,
                         accept_best: bool = False):
    """Resample flagged cones (and cones their walks pass through) until no event fires.

    Returns ``(H, R, report)`` where H holds the walks that are paths and R
    the edges of bad and short walks.  After ``budget // 2`` unsuccessful
    rounds every cone is resampled once.  With ``eps`` a vertex missing
    the degree window, conflict or remainder bound at that tolerance also
    flags every cone centered there.  With ``accept_best`` an exhausted
    budget returns the round with the fewest remainder edges instead of
    raising.
    """
    version = {cone.id: 0 for cone in cs.cones}
    pairs = {cone.id: cone for cone in cs.cones if cone.kind == "pair"}
    at_center: dict[int, list[int]] = {}
    for cone in cs.cones:
        at_center.setdefault(cone.center, []).append(cone.id)
    restarts = 0
    best = smallest = None
    for rnd in range(1, budget + 1):
        perms = {cid: _cone_perm(seed, cone, version[cid]) for cid, cone in pairs.items()}
        wd = _trace(cs, perms)
        report = classify_events(wd)
        report.rounds, report.restarts = rnd, restarts
        flagged = report.flagged()
        if eps is not None:
            report.vertex_flags = vertex_events(wd, eps)
            flagged = sorted(set(flagged).union(*(at_center.get(v, ()) for v in report.vertex_flags)))
        if best is None or len(flagged) < best[2]:
            best = (wd, report, len(flagged))
        rem = sum(len(w.edges) for w in wd.walks if w.kind != "path")
        if smallest is None or rem < smallest[0]:
            smallest = (rem, wd, report)
        if not flagged:
            return _harvest(wd) + (report,)
        if rnd == budget // 2:
            restarts += 1
            for cid in version:
                version[cid] += 1
            continue
        touched = set(flagged)
        flagged_set = set(flagged)
        for w in wd.walks:
            if flagged_set.intersection(w.cones):
                touched.update(w.cones)
        for cid in touched:
            version[cid] += 1
    if accept_best:
        return _harvest(smallest[1]) + (smallest[2],)
    raise BudgetExhausted(f"cone events still present after {budget} rounds", flagged=best[2], report=best[1])


def _harvest(wd: WalkDecomposition) -> tuple[OrientedPathGraph, frozenset]:
    paths, tails, rest = [], [], set()
    for w in wd.walks:
        if w.kind == "path":
            paths.append(Path(w.verts, w.edges))
            tails.append(w.verts[0])
        else:
            rest.update(w.edges)
    return OrientedPathGraph(PathGraph(wd.system.host, paths), tails), frozenset(rest)


@dataclass
class DenseResult:
    """Output of :func:`dense_path_graph`; unpacks as ``(H, R)``."""

    H: OrientedPathGraph
    R: frozenset
    report: EventReport | None
    checks: dict[str, bool]
    stats: dict = field(default_factory=dict)

    def __iter__(self):
        return iter((self.H, self.R))


def dense_checks(G: MultiGraph, H: OrientedPathGraph, R, ell: int, eps: float) -> tuple[dict[str, bool], dict]:
    dR = [0] * G.n
    for e in R:
        u, v = G.ends[e]
        dR[u] += 1
        dR[v] += 1
    lo_ratio = hi_ratio = None
    ratio_ok = remainder_ok = private_ok = True
    for v in range(G.n):
        d = G.degree(v)
        if d == 0:
            continue
        dh = H.graph.degree(v)
        ratio = dh / d
        lo_ratio = ratio if lo_ratio is None else min(lo_ratio, ratio)
        hi_ratio = ratio if hi_ratio is None else max(hi_ratio, ratio)
        if not (1 - eps) / ell <= ratio <= (1 + eps) / ell:
            ratio_ok = False
        if dR[v] > eps * dh:
            remainder_ok = False
        if H.out_degree(v) < (1 - eps) / (2 * ell) * d:
            private_ok = False
    conf = H.graph.conflict_ratio()
    checks = {"degree_ratio": ratio_ok, "conflict": conf <= Fraction(eps).limit_denominator(10_000),
              "remainder": remainder_ok, "private": private_ok}
    stats = {"ratio_min": lo_ratio, "ratio_max": hi_ratio, "conf": float(conf), "remainder_edges": len(R),
             "paths": len(H.paths)}
    return checks, stats


def dense_path_graph(G: MultiGraph, ell: int, eps: float = 0.3, params: ConeParams | None = None, seed=None,
                     strict: bool = True) -> DenseResult:
    """Oriented ell-path-graph H with small conflicts, plus the remainder R.

    With ``strict`` the degree window, conflict and remainder bounds are
    required at tolerance ``eps``; failing attempts are retried with fresh
    seeds and finally reported as budget exhaustion.
    """
    params = params or ConeParams()
    if G.m and G.min_degree() < params.min_degree:
        raise PreconditionError(f"minimum degree {G.min_degree()} below threshold {params.min_degree}")
    rng = random.Random(seed)
    if ell == 1:
        H = orient_paths_balanced(PathGraph(G, [Path.edge(e, u, v) for e, u, v in G.edges()]), seed=rng.random())
        checks, stats = dense_checks(G, H, frozenset(), ell, eps)
        return DenseResult(H, frozenset(), None, checks, stats)
    last = None
    for attempt in range(params.attempts if strict else 1):
        try:
            cs = build_cone_system(G, ell, params.c, params.b, seed=rng.random(), strict_degree=params.strict_degree)
            H, R, report = resample_until_clear(cs, params.budget, seed=rng.random(), eps=eps if strict else None,
                                                  accept_best=not strict)
        except DecompositionError as exc:
            raise exc.tagged("cones")
        checks, stats = dense_checks(G, H, R, ell, eps)
        stats.update(c=cs.c, b=cs.b, rounds=report.rounds, fallback_blocks=cs.fallback_blocks, attempt=attempt)
        last = DenseResult(H, R, report, checks, stats)
        if not strict or all(checks.values()):
            return last
    raise BudgetExhausted(f"dense path-graph failed its checks after {params.attempts} attempts",
                          stage="dense", checks=last.checks, stats=last.stats)


@dataclass
class CheckedPathGraph:
    """A path-graph together with the bounds it was checked against."""

    graph: PathGraph
    checks: dict[str, bool]
    stats: dict = field(default_factory=dict)


@dataclass
class LL1Params:
    fraction: Fraction | None = None  # share of G feeding the private paths; None -> 1/(9 ell)
    eps: float = 0.3
    cones: ConeParams = field(default_factory=ConeParams)
    attempts: int = 4
    strict: bool = False  # require the conflict and degree-window bounds
    private_rule: str = "out"  # "out": outgoing H1 paths only; "any": either end of any path


def assign_private_paths(G: MultiGraph, R: MultiGraph, pool: list[Path], tails: list[int | None]) -> dict[int, tuple[int, int]]:
    """Match leftover edges to distinct paths of ``pool``.

    Edge vu may be glued at v to a path with an end v that avoids u.
    ``tails[i]`` restricts path i to that end; None allows both ends.  A
    maximum bipartite matching gives the largest possible assignment,
    returned as ``edge -> (path index, gluing vertex)``.
    """
    rows = sorted(R.ends)
    if not rows or not pool:
        return {}
    at: dict[int, list[int]] = {}
    for i, P in enumerate(pool):
        for x in (P.ends if tails[i] is None else (tails[i],)):
            at.setdefault(x, []).append(i)
    ri, ci, glue = [], [], {}
    for r, e in enumerate(rows):
        a, b = G.ends[e]
        for v, u in ((a, b), (b, a)):
            for i in at.get(v, ()):
                if u not in pool[i].vset and (r, i) not in glue:
                    ri.append(r)
                    ci.append(i)
                    glue[(r, i)] = v
    if not ri:
        return {}
    adj = sp.csr_matrix((np.ones(len(ri), dtype=np.int8), (ri, ci)), shape=(len(rows), len(pool)))
    match = maximum_bipartite_matching(adj, perm_type="column")
    return {rows[r]: (int(i), glue[(r, int(i))]) for r, i in enumerate(match) if i >= 0}


def ll1_decomposition(G: MultiGraph, ell: int, params: LL1Params | None = None, seed=None) -> CheckedPathGraph:
    """Decompose every edge of G into paths of length ell or ell + 1.

    A small fraction G1 of G and its complement G2 are each turned into a
    dense ell-path-graph.  Every leftover edge vu is then glued in front of
    an unused outgoing ell-path of v in H1 that avoids u.
    """
    params = params or LL1Params()
    frac = params.fraction if params.fraction is not None else Fraction(1, 9 * ell)
    rng = random.Random(seed)
    failure = None
    for attempt in range(params.attempts):
        try:
            return _ll1_attempt(G, ell, frac, params, rng.random(), attempt)
        except BudgetExhausted as exc:
            failure = exc
    raise failure.tagged("ll1")


def _ll1_attempt(G: MultiGraph, ell: int, frac: Fraction, params: LL1Params, seed, attempt: int) -> CheckedPathGraph:
    rng = random.Random(seed)
    G1_edges = alpha_fraction(G, frac, slack_budget=128, seed=rng.random()).edges if frac < 1 else frozenset(G.ends)
    G1, G2 = G.subgraph(G1_edges), G.without(G1_edges)
    H1, R1 = dense_path_graph(G1, ell, params.eps, params.cones, seed=rng.random(), strict=False)
    if G2.m:
        H2, R2 = dense_path_graph(G2, ell, params.eps, params.cones, seed=rng.random(), strict=False)
    else:
        H2, R2 = OrientedPathGraph(PathGraph(G2, []), []), frozenset()
    R = G.subgraph(R1 | R2)
    if params.private_rule == "any":
        pool = list(H1.paths) + list(H2.paths)
        tails = [None] * len(pool)
    elif params.private_rule == "out":
        pool, tails = list(H1.paths), list(H1.tails)
    else:
        raise PreconditionError(f"unknown private-path rule {params.private_rule!r}")
    assignment = assign_private_paths(G, R, pool, tails)
    missing = [e for e in R.ends if e not in assignment]
    if missing:
        u, v = R.ends[missing[0]]
        raise BudgetExhausted(f"{len(missing)} leftover edges found no private {ell}-path (first at {u}-{v})",
                              vertex=u, attempt=attempt, missing=len(missing), remainder=R.m)
    used = set()
    extended: list[Path] = []
    for e in sorted(assignment):
        i, v = assignment[e]
        u = G.other(e, v)
        used.add(i)
        extended.append(Path((u, v), (e,)).join(pool[i].starting_at(v)))
    paths = [P for i, P in enumerate(pool) if i not in used] + extended
    if params.private_rule == "out":
        paths += list(H2.paths)
    H = PathGraph(G, paths)
    if H.edge_ids() != set(G.ends):
        raise InvariantViolation("(ell, ell+1) decomposition does not cover the graph")
    conf = H.conflict_ratio()
    window_ok = all((1 - params.eps) / ell * G.degree(v) <= H.degree(v) <= (1 + params.eps) / ell * G.degree(v)
                    for v in range(G.n) if G.degree(v))
    checks = {"lengths": set(H.lengths()) <= {ell, ell + 1},
              "conflict": conf <= Fraction(1, 4 * (ell + 10)),
              "degree_window": window_ok}
    if not checks["lengths"]:
        raise InvariantViolation(f"unexpected path lengths {dict(H.lengths())}")
    if params.strict and not all(checks.values()):
        raise BudgetExhausted("(ell, ell+1) decomposition missed its bounds", checks=checks)
    stats = {"conf": float(conf), "remainder_edges": R.m, "extended": len(extended),
             "h1_paths": len(H1.paths), "h2_paths": len(H2.paths), "attempt": attempt}
    return CheckedPathGraph(H, checks, stats)
