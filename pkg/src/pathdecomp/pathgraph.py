"""Paths, path-graphs, conflict ratios and non-conflicting Euler tours."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from .equalize import balanced_orientation
from .errors import BudgetExhausted, InvariantViolation, PreconditionError
from .graph import MultiGraph


@dataclass(frozen=True)
class Path:
    """Simple path given by its vertex sequence and the edge ids between them.

    Virtual paths (the dummy path of the pipeline) carry negative edge ids
    and interior vertices outside the host's vertex range.
    """

    verts: tuple[int, ...]
    edges: tuple[int, ...]
    virtual: bool = False
    vset: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.edges) != len(self.verts) - 1 or not self.edges:
            raise InvariantViolation(f"path needs k >= 1 edges and k + 1 vertices, got {self.verts}")
        object.__setattr__(self, "vset", frozenset(self.verts))

    @classmethod
    def edge(cls, e: int, u: int, v: int) -> "Path":
        return cls((u, v), (e,))

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def start(self) -> int:
        return self.verts[0]

    @property
    def end(self) -> int:
        return self.verts[-1]

    @property
    def ends(self) -> tuple[int, int]:
        return self.verts[0], self.verts[-1]

    def is_simple(self) -> bool:
        return len(self.vset) == len(self.verts)

    def other_end(self, v: int) -> int:
        if v == self.start:
            return self.end
        if v == self.end:
            return self.start
        raise PreconditionError(f"{v} is not an end of path {self.verts}")

    def reversed(self) -> "Path":
        return Path(self.verts[::-1], self.edges[::-1], self.virtual)

    def starting_at(self, v: int) -> "Path":
        if v == self.start:
            return self
        if v == self.end:
            return self.reversed()
        raise PreconditionError(f"{v} is not an end of path {self.verts}")

    def join(self, other: "Path") -> "Path":
        """Concatenate ``self`` then ``other``; they must meet at self.end == other.start."""
        if self.end != other.start:
            raise InvariantViolation(f"cannot join {self.verts} and {other.verts}")
        return Path(self.verts + other.verts[1:], self.edges + other.edges, self.virtual or other.virtual)

    def valid_in(self, G: MultiGraph) -> bool:
        if self.virtual:
            return True
        for i, e in enumerate(self.edges):
            if e not in G.ends or set(G.ends[e]) != {self.verts[i], self.verts[i + 1]}:
                return False
        return self.is_simple()


def concat_at(P: Path, Q: Path, v: int) -> Path:
    """The path ``P`` then ``Q`` glued at their common end ``v``."""
    return P.starting_at(P.other_end(v)).join(Q.starting_at(v))


def conflicting(P: Path, Q: Path, v: int) -> bool:
    """Do P and Q, both ending at v, meet somewhere other than v?

    A common far end (two paths joining the same pair of vertices) is not
    counted: consecutive tour slices never reach it.  Use
    :func:`can_concatenate` when the union itself must be a simple path.
    """
    if v not in P.ends or v not in Q.ends:
        raise PreconditionError(f"vertex {v} is not an end of both paths")
    common = set(P.vset & Q.vset) - {v}
    if not common:
        return False
    far = P.other_end(v)
    return common != {far} or Q.other_end(v) != far


def can_concatenate(P: Path, Q: Path, v: int) -> bool:
    """True iff P and Q share v only, so gluing them at v gives a simple path."""
    if v not in P.ends or v not in Q.ends:
        raise PreconditionError(f"vertex {v} is not an end of both paths")
    return len(P.vset & Q.vset) == 1


class PathGraph:
    """Edge-disjoint simple paths on a host graph, with shadow-degree views."""

    def __init__(self, host: MultiGraph, paths, validate: bool = True):
        self.host = host
        self.paths: list[Path] = list(paths)
        self.at: dict[int, list[int]] = {}
        for i, P in enumerate(self.paths):
            for v in P.ends:
                self.at.setdefault(v, []).append(i)
        if validate:
            self.validate()

    def validate(self) -> None:
        seen: set[int] = set()
        for P in self.paths:
            if not P.valid_in(self.host):
                raise InvariantViolation(f"path {P.verts} is not a simple path of the host")
            if P.virtual:
                continue
            for e in P.edges:
                if e in seen:
                    raise InvariantViolation(f"edge {e} used by two paths")
                seen.add(e)

    def __len__(self) -> int:
        return len(self.paths)

    def degree(self, v: int) -> int:
        return len(self.at.get(v, ()))

    def shadow(self) -> MultiGraph:
        n = max([self.host.n] + [max(P.ends) + 1 for P in self.paths])
        return MultiGraph(n, {i: P.ends for i, P in enumerate(self.paths)})

    def edge_ids(self) -> set[int]:
        return {e for P in self.paths if not P.virtual for e in P.edges}

    def lengths(self) -> Counter:
        return Counter(len(P) for P in self.paths)

    def underlying_degrees(self) -> list[int]:
        deg = [0] * self.host.n
        for e in self.edge_ids():
            u, v = self.host.ends[e]
            deg[u] += 1
            deg[v] += 1
        return deg

    def is_eulerian(self) -> bool:
        return all(len(lst) % 2 == 0 for lst in self.at.values())

    def is_connected(self) -> bool:
        S = self.shadow()
        comps = [c for c in S.components() if any(S.degree(v) for v in c)]
        return len(comps) <= 1

    def conflict_ratio(self, v: int | None = None) -> Fraction:
        """conf(v) = max_w |{P at v : w in P}| / d_H(v); conf(H) when v is None."""
        if v is None:
            return max((self.conflict_ratio(x) for x in self.at), default=Fraction(0))
        incident = self.at.get(v, [])
        if not incident:
            return Fraction(0)
        counts = Counter(w for i in incident for w in self.paths[i].vset if w != v)
        return Fraction(max(counts.values(), default=0), len(incident))

    def transition_system(self) -> dict[int, dict[int, set[int]]]:
        """Conflict-induced forbidden pairs: S[v][i] = paths at v conflicting with path i."""
        S: dict[int, dict[int, set[int]]] = {}
        for v, incident in self.at.items():
            Sv = {i: set() for i in incident}
            for a in range(len(incident)):
                for b in range(a + 1, len(incident)):
                    i, j = incident[a], incident[b]
                    if conflicting(self.paths[i], self.paths[j], v):
                        Sv[i].add(j)
                        Sv[j].add(i)
            S[v] = Sv
        return S


def conflict_ratio(H: PathGraph) -> Fraction:
    return H.conflict_ratio()


@dataclass
class OrientedPathGraph:
    """A path-graph whose paths are directed; ``private(v)`` lists paths leaving v."""

    graph: PathGraph
    tails: list[int]

    def __post_init__(self):
        self.out: dict[int, list[int]] = {}
        for i, t in enumerate(self.tails):
            self.out.setdefault(t, []).append(i)

    @property
    def paths(self) -> list[Path]:
        return self.graph.paths

    def directed(self, i: int) -> Path:
        return self.graph.paths[i].starting_at(self.tails[i])

    def private(self, v: int) -> list[int]:
        return self.out.get(v, [])

    def out_degree(self, v: int) -> int:
        return len(self.out.get(v, ()))

    def in_degree(self, v: int) -> int:
        return self.graph.degree(v) - self.out_degree(v)

    def is_balanced(self) -> bool:
        return all(abs(self.out_degree(v) - self.in_degree(v)) <= 1 for v in self.graph.at)


def orient_paths_balanced(H: PathGraph, seed=None) -> OrientedPathGraph:
    """Direct the paths so every vertex has out- and in-degree within one."""
    S = H.shadow()
    D = balanced_orientation(S, seed=seed)
    tails = [D.tail(i) for i in range(len(H.paths))]
    return OrientedPathGraph(H, tails)


def jackson_condition(H: PathGraph, S: dict | None = None) -> bool:
    """``|S_v(P)| <= d_H(v)/2 - 2`` for every vertex v and path P at v."""
    if S is None:
        S = H.transition_system()
    for v, Sv in S.items():
        d = H.degree(v)
        if any(2 * len(forbidden) > d - 4 for forbidden in Sv.values()):
            return False
    return True


@dataclass
class Tour:
    """Closed traversal: ``steps[k] = (path index, forward)``."""

    graph: PathGraph
    steps: list[tuple[int, bool]]

    def oriented(self, k: int) -> Path:
        i, fwd = self.steps[k]
        P = self.graph.paths[i]
        return P if fwd else P.reversed()

    def oriented_paths(self) -> list[Path]:
        return [self.oriented(k) for k in range(len(self.steps))]

    def vertices(self) -> list[int]:
        """Vertex sequence of the flattened tour (start vertex repeated at the end)."""
        out = [self.oriented(0).start] if self.steps else []
        for P in self.oriented_paths():
            out.extend(P.verts[1:])
        return out

    def edges(self) -> list[int]:
        return [e for P in self.oriented_paths() for e in P.edges]


def verify_tour(H: PathGraph, tour: Tour) -> list[str]:
    """Violations of: every path once, continuity, no conflicting consecutive pair."""
    out = []
    used = Counter(i for i, _ in tour.steps)
    if set(used) != set(range(len(H.paths))) or any(c != 1 for c in used.values()):
        out.append("paths not used exactly once")
    steps = tour.oriented_paths()
    for k, P in enumerate(steps):
        Q = steps[(k + 1) % len(steps)]
        if P.end != Q.start:
            out.append(f"step {k} ends at {P.end} but step {k + 1} starts at {Q.start}")
        elif len(steps) > 1 and conflicting(P, Q, P.end):
            out.append(f"steps {k} and {k + 1} conflict at {P.end}")
    return out


def _pair_ends(H: PathGraph, v: int, rng: random.Random, S: dict[int, set[int]]) -> list[tuple[int, int]] | None:
    """Perfect matching of the paths at v in the non-conflict graph."""
    incident = H.at[v]
    # conflicts are sparse, so a random greedy pairing nearly always works;
    # the blossom matching is only the fallback
    for _ in range(3):
        left = list(incident)
        rng.shuffle(left)
        pairs = []
        while left:
            i = left.pop()
            j = next((k for k in reversed(left) if k not in S[i]), None)
            if j is None:
                break
            left.remove(j)
            pairs.append(tuple(sorted((i, j))))
        else:
            return sorted(pairs)
    M = nx.Graph()
    M.add_nodes_from(incident)
    for a in range(len(incident)):
        for b in range(a + 1, len(incident)):
            i, j = incident[a], incident[b]
            if j not in S[i]:
                M.add_edge(i, j, weight=1 + rng.random())
    match = nx.max_weight_matching(M, maxcardinality=True)
    if 2 * len(match) != len(incident):
        return None
    return sorted(tuple(sorted(p)) for p in match)


def euler_tour_nonconflicting(H: PathGraph, seed=None, budget: int = 20) -> Tour:
    """Euler tour of the shadow of H whose consecutive paths never conflict.

    Each vertex pairs up the path ends arriving there (a perfect matching
    in the non-conflict graph), which splits H into closed trails.  Trails
    are then merged by re-pairing two transitions of different trails at a
    shared vertex whenever both new pairs are non-conflicting.  If merging
    stalls the attempt is restarted with a fresh seed.
    """
    if not H.paths:
        raise PreconditionError("path-graph is empty")
    if not H.is_eulerian():
        odd = sorted(v for v, lst in H.at.items() if len(lst) % 2)
        raise PreconditionError(f"path-graph is not eulerian; odd vertices {odd[:10]}")
    if not H.is_connected():
        raise PreconditionError("path-graph is not connected")
    S = H.transition_system()
    rng = random.Random(seed)
    for _ in range(budget):
        tour = _attempt_tour(H, S, rng)
        if tour is not None:
            bad = verify_tour(H, tour)
            if bad:
                raise InvariantViolation(f"tour failed verification: {bad[:3]}")
            return tour
    raise BudgetExhausted(f"no non-conflicting Euler tour within {budget} attempts",
                          jackson=jackson_condition(H, S))


def _attempt_tour(H: PathGraph, S, rng: random.Random) -> Tour | None:
    # partner[(v, i)] = path paired with path i at vertex v
    partner: dict[tuple[int, int], int] = {}
    pairs_at: dict[int, list[tuple[int, int]]] = {}
    for v in H.at:
        pairs = _pair_ends(H, v, rng, S[v])
        if pairs is None:
            return None
        pairs_at[v] = pairs
        for i, j in pairs:
            partner[(v, i)] = j
            partner[(v, j)] = i

    # label the closed trails
    parent = list(range(len(H.paths)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (v, i), j in partner.items():
        a, b = find(i), find(j)
        if a != b:
            parent[a] = b
    trails = len({find(i) for i in range(len(H.paths))})

    vertices = sorted(H.at)
    while trails > 1:
        rng.shuffle(vertices)
        merged = False
        for v in vertices:
            pairs = pairs_at[v]
            if len(pairs) < 2:
                continue
            order = list(range(len(pairs)))
            rng.shuffle(order)
            for x in range(len(order)):
                a, b = pairs[order[x]]
                for y in range(x + 1, len(order)):
                    c, d = pairs[order[y]]
                    if find(a) == find(c):
                        continue
                    for p, q, r, s in ((a, c, b, d), (a, d, b, c)):
                        if q not in S[v][p] and s not in S[v][r]:
                            pairs[order[x]] = (p, q)
                            pairs[order[y]] = (r, s)
                            partner[(v, p)], partner[(v, q)] = q, p
                            partner[(v, r)], partner[(v, s)] = s, r
                            parent[find(a)] = find(c)
                            trails -= 1
                            merged = True
                            break
                    if merged:
                        break
                if merged:
                    break
            if merged:
                break
        if not merged:
            return None

    # walk the single closed trail from the lowest vertex
    start_v = min(H.at)
    first = min(H.at[start_v])
    steps: list[tuple[int, bool]] = []
    i, v = first, start_v
    while True:
        P = H.paths[i]
        fwd = P.start == v
        steps.append((i, fwd))
        w = P.end if fwd else P.start
        j = partner[(w, i)]
        if j == first and w == start_v:
            break
        i, v = j, w
        if len(steps) > len(H.paths):
            raise InvariantViolation("trail walk did not close")
    return Tour(H, steps)
