"""End-to-end decompositions into ell-paths.

Two drivers share the tail of the construction (a connected path-graph
with lengths in [ell, ell+3], a non-conflicting Euler tour, and cutting
that tour every ell edges):

* :func:`decompose_24` for highly edge-connected graphs, with a max-cut,
  two bipartite path-trees and a parity correction in front;
* :func:`decompose_eulerian4` for eulerian graphs, which need no parity
  correction.
"""

from __future__ import annotations

import json
import logging
import random
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction

import numpy as np

from .cones import ConeParams, LL1Params
from .equalize import balanced_arc_strong, pack_arborescences, split_fractions
from .errors import BudgetExhausted, DecompositionError, InvariantViolation, PreconditionError
from .graph import MultiGraph, edge_connectivity, induced_cross_graph, locally_max_cut
from .pathgraph import Path, PathGraph, Tour, euler_tour_nonconflicting
from .pathtrees import CoverParams, TreeParams, bipartite_l2l_tree, cover_llp1, parity_subtree

log = logging.getLogger(__name__)


@dataclass
class PipelineConfig:
    """Knobs of a pipeline run.

    The defaults are desk-scale values; :meth:`asymptotic` returns the
    shares used by the original construction, which only pay off at very
    large degree.
    """

    ell: int = 3
    seed: int = 0
    min_degree: int = 0
    c: int | None = None
    b: int | None = None
    eps: float = 0.3
    cone_budget: int = 40
    orientation_budget: int = 200
    tour_budget: int = 20
    attempts: int = 3
    l2l_fraction: Fraction = Fraction(1, 2)  # share of R handed to each bipartite path-tree
    tree_fraction: Fraction = Fraction(1, 2)  # inside that share, the part spent on tree growing
    cover_fraction: Fraction | None = Fraction(1)  # None -> 1/(5 ell)
    ll1_fraction: Fraction | None = Fraction(1)  # None -> 1/(9 ell)
    private_rule: str = "any"  # "out" restricts private edges and paths to outgoing ones
    growth: int = 1
    strict: bool = False

    def __post_init__(self):
        for name in ("l2l_fraction", "tree_fraction", "cover_fraction", "ll1_fraction"):
            val = getattr(self, name)
            if val is not None:
                setattr(self, name, Fraction(val))
        self.validate()

    def validate(self) -> None:
        if self.ell < 2:
            raise PreconditionError("ell must be at least 2")
        for name in ("cone_budget", "orientation_budget", "tour_budget", "attempts", "growth"):
            if getattr(self, name) <= 0:
                raise PreconditionError(f"{name} must be positive")
        if not 0 < self.eps < 1:
            raise PreconditionError("eps must lie in (0, 1)")
        if self.min_degree < 0:
            raise PreconditionError("min_degree must be non-negative")
        if self.private_rule not in ("any", "out"):
            raise PreconditionError("private_rule must be 'any' or 'out'")
        if not 0 < 2 * self.l2l_fraction <= 1:
            raise PreconditionError("l2l_fraction must lie in (0, 1/2]")

    @classmethod
    def asymptotic(cls, **kw) -> "PipelineConfig":
        base = dict(cover_fraction=None, ll1_fraction=None, growth=4, l2l_fraction=Fraction(1, 20),
                    private_rule="out")
        base.update(kw)
        return cls(**base)

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise PreconditionError(f"unknown config keys {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        out = asdict(self)
        return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in out.items()}

    def cones(self) -> ConeParams:
        return ConeParams(c=self.c, b=self.b, budget=self.cone_budget)

    def cover(self, ell: int) -> CoverParams:
        ll1 = LL1Params(fraction=self.ll1_fraction, eps=self.eps, cones=self.cones(), private_rule=self.private_rule)
        return CoverParams(fraction=self.cover_fraction, ll1=ll1, strict=self.strict)

    def trees(self) -> TreeParams:
        return TreeParams(tree_fraction=self.tree_fraction, growth=self.growth, eps=self.eps, cones=self.cones(),
                          private_rule=self.private_rule)


@dataclass
class Decomposition:
    """ell-paths partitioning E(G), plus at most one shorter leftover path."""

    ell: int
    paths: list[Path]
    leftover: Path | None = None
    meta: dict = field(default_factory=dict)

    def violations(self, G: MultiGraph) -> list[str]:
        out = []
        used: list[int] = []
        for P in self.all_paths():
            if not P.valid_in(G):
                out.append(f"path {P.verts} is not a simple path of G")
            used.extend(P.edges)
        if sorted(used) != sorted(G.ends):
            out.append("paths do not partition the edges")
        bad = [P.verts for P in self.paths if len(P) != self.ell]
        if bad:
            out.append(f"{len(bad)} paths have the wrong length")
        if self.leftover is not None and not 1 <= len(self.leftover) < self.ell:
            out.append(f"leftover of length {len(self.leftover)}")
        return out

    def all_paths(self) -> list[Path]:
        return self.paths + ([self.leftover] if self.leftover is not None else [])

    def report(self, G: MultiGraph, verified: bool = True) -> dict:
        label = G.labels
        return {
            "n": G.n,
            "m": G.m,
            "ell": self.ell,
            "seed": self.meta.get("seed"),
            "paths": [[label[v] for v in P.verts] for P in self.paths],
            "leftover": None if self.leftover is None else [label[v] for v in self.leftover.verts],
            "stages": self.meta.get("stages", {}),
            "verified": verified,
        }

    def to_json(self, G: MultiGraph) -> str:
        return json.dumps(self.report(G), indent=1, default=_jsonable)

    def to_dot(self, G: MultiGraph) -> str:
        lines = ["graph decomposition {"]
        for k, P in enumerate(self.all_paths()):
            tag = "leftover" if P is self.leftover else f"p{k}"
            for u, v in zip(P.verts, P.verts[1:]):
                lines.append(f'  {G.labels[u]} -- {G.labels[v]} [label="{tag}", colorscheme=set312, '
                             f'color={k % 12 + 1}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _jsonable(x):
    if isinstance(x, Fraction):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    return str(x)


@contextmanager
def _stage(name: str, stages: dict):
    t = time.perf_counter()
    try:
        yield
    except DecompositionError as exc:
        raise exc.tagged(name)
    finally:
        stages.setdefault(name, {})["seconds"] = round(time.perf_counter() - t, 3)


def _check_ledger(G: MultiGraph, parts: dict[str, set], stage: str) -> None:
    """The named edge sets must partition E(G)."""
    total = sum(len(p) for p in parts.values())
    union = set().union(*parts.values()) if parts else set()
    if total != len(union) or union != set(G.ends):
        raise InvariantViolation(f"edge ledger broken after {stage}: {total} listed, {len(union)} distinct, "
                                 f"{G.m} in the graph", stage=stage)


# ---------------------------------------------------------------------------
# cutting a tour
# ---------------------------------------------------------------------------


def cut_tour(tour: Tour, ell: int, dummy: int | None = None) -> tuple[list[Path], Path | None]:
    """Slice a non-conflicting tour into consecutive ell-paths.

    ``dummy`` is the index of a virtual path of the tour; the tour is
    rotated to start right after it and the dummy is dropped.  The final
    slice, if shorter than ell, is returned as the leftover.
    """
    steps = tour.oriented_paths()
    if dummy is not None:
        k = next((k for k, (i, _) in enumerate(tour.steps) if i == dummy), None)
        if k is None:
            raise PreconditionError("dummy path is not part of the tour")
        steps = steps[k + 1:] + steps[:k]
    verts: list[int] = [steps[0].start] if steps else []
    edges: list[int] = []
    for P in steps:
        if P.virtual:
            raise PreconditionError("tour holds a virtual path other than the dummy")
        if verts[-1] != P.start:
            raise InvariantViolation("tour is not continuous")
        verts.extend(P.verts[1:])
        edges.extend(P.edges)
    out = []
    for a in range(0, len(edges), ell):
        b = min(a + ell, len(edges))
        piece = Path(tuple(verts[a:b + 1]), tuple(edges[a:b]))
        if not piece.is_simple():
            raise InvariantViolation(f"slice {piece.verts} of the tour is not simple")
        out.append(piece)
    leftover = out.pop() if out and len(out[-1]) < ell else None
    return out, leftover


def split_evenly(P: Path, ell: int) -> list[Path]:
    """Cut a path whose length is a multiple of ell into ell-paths."""
    if len(P) % ell:
        raise InvariantViolation(f"path of length {len(P)} is not a multiple of {ell}")
    return [Path(P.verts[a:a + ell + 1], P.edges[a:a + ell]) for a in range(0, len(P), ell)]


def _refine(paths: list[Path], leftover: Path | None, ell: int) -> tuple[list[Path], Path | None]:
    """Turn a decomposition at 2 ell into one at ell."""
    out = [Q for P in paths for Q in split_evenly(P, ell)]
    if leftover is not None:
        whole = len(leftover) // ell * ell
        if whole:
            out.extend(split_evenly(Path(leftover.verts[:whole + 1], leftover.edges[:whole]), ell))
        leftover = None if whole == len(leftover) else Path(leftover.verts[whole:], leftover.edges[whole:])
    return out, leftover


def window_violations(verts: list[int], ell: int) -> int:
    """Number of closed subwalks of length at most ell in a closed vertex sequence.

    ``verts`` lists the tour with its start repeated at the end.
    """
    seq = np.asarray(verts[:-1])
    return int(sum(np.count_nonzero(seq == np.roll(seq, -t)) for t in range(1, min(ell, len(seq) - 1) + 1)))


# ---------------------------------------------------------------------------
# highly edge-connected graphs
# ---------------------------------------------------------------------------


def _arborescence_parts(Gp: MultiGraph, k: int, cfg: PipelineConfig, seed, stages: dict):
    rng = random.Random(seed)
    with _stage("orient", stages):
        D = balanced_arc_strong(Gp, k, budget=cfg.orientation_budget, seed=rng.random(), root=0)
    with _stage("arborescences", stages):
        trees = pack_arborescences(D, 0, k, seed=rng.random())
    stages["arborescences"]["trees"] = len(trees)
    return trees


def _dummy_path(u: int, v: int, ell: int, n: int) -> Path:
    inner = tuple(range(n, n + ell - 1))
    return Path((u, *inner, v), tuple(-(i + 1) for i in range(ell)), virtual=True)


def _tour_and_cut(G: MultiGraph, H: PathGraph, ell: int, cfg: PipelineConfig, seed, stages: dict):
    odd = sorted(v for v, lst in H.at.items() if len(lst) % 2)
    dummy = None
    paths = list(H.paths)
    if len(odd) == 2:
        paths.append(_dummy_path(odd[0], odd[1], ell, G.n))
        dummy = len(paths) - 1
    elif odd:
        raise InvariantViolation(f"{len(odd)} odd vertices before the tour", stage="parity")
    stages["dummy"] = dummy is not None
    with _stage("tour", stages):
        tour = euler_tour_nonconflicting(PathGraph(H.host, paths), seed=seed, budget=cfg.tour_budget)
    with _stage("cut", stages):
        pieces, leftover = cut_tour(tour, ell, dummy)
    return tour, pieces, leftover


def _decompose_24_once(G: MultiGraph, L: int, cfg: PipelineConfig, seed, stages: dict):
    rng = random.Random(seed)
    with _stage("cut", stages):
        cut = locally_max_cut(G, seed=rng.random())
        if cut.connectivity < 12:
            raise BudgetExhausted(f"cross graph is only {cut.connectivity}-edge-connected")
    stages["cut"].update(cross=len(cut.cross), connectivity=cut.connectivity, flips=cut.flips)
    Gp = induced_cross_graph(G, cut)
    V1, V2 = cut.parts
    trees = _arborescence_parts(Gp, 6, cfg, rng.random(), stages)
    G1 = Gp.subgraph(trees[0].edge_ids() | trees[1].edge_ids())
    G2 = Gp.subgraph(trees[2].edge_ids() | trees[3].edge_ids())
    G3 = Gp.subgraph(trees[4].edge_ids() | trees[5].edge_ids())
    R = Gp.without(set(G1.ends) | set(G2.ends) | set(G3.ends))
    outside = set(G.ends) - set(Gp.ends)
    _check_ledger(G, {"G1": set(G1.ends), "G2": set(G2.ends), "G3": set(G3.ends), "R": set(R.ends),
                      "outside": outside}, "arborescences")

    with _stage("l2l", stages):
        R1, R2 = split_fractions(R, [cfg.l2l_fraction, cfg.l2l_fraction], seed=rng.random())
        first = bipartite_l2l_tree(G1, R.subgraph(R1), V1, L, cfg.trees(), seed=rng.random())
        second = bipartite_l2l_tree(G2, R.subgraph(R2), V2, L, cfg.trees(), seed=rng.random())
    stages["l2l"].update(first=first.stats, second=second.stats)
    rest = (set(R.ends) - R1 - R2) | first.unused | second.unused | outside
    _check_ledger(G, {"T1": first.tree.graph.edge_ids(), "T2": second.tree.graph.edge_ids(),
                      "G3": set(G3.ends), "R": rest}, "l2l")

    # parity: drop tree paths so that each side keeps at most one odd vertex
    removed: list[Path] = []
    current = G
    with _stage("parity", stages):
        for side, tree in ((V1, first.tree), (V2, second.tree)):
            odd = [v for v in sorted(side) if current.degree(v) % 2]
            if len(odd) % 2:
                odd.pop()
            chosen = parity_subtree(tree, odd)
            picked = [tree.paths[i] for i in chosen]
            removed.extend(picked)
            current = current.without(e for P in picked for e in P.edges)
            left_odd = [v for v in side if current.degree(v) % 2]
            if len(left_odd) > 1:
                raise InvariantViolation(f"{len(left_odd)} odd vertices remain on one side")
    stages["parity"]["removed"] = len(removed)
    removed_edges = {e for P in removed for e in P.edges}
    G3_edges = set(G3.ends)
    R_final = G.without(removed_edges | G3_edges)
    _check_ledger(G, {"removed": removed_edges, "G3": G3_edges, "R": set(R_final.ends)}, "parity")

    with _stage("cover", stages):
        H = cover_llp1(G3, R_final, L, cfg.cover(L), seed=rng.random())
    stages["cover"].update(checks=H.checks, conf=H.stats["conf"], lengths=dict(H.graph.lengths()))
    _check_ledger(G, {"removed": removed_edges, "H": H.graph.edge_ids()}, "cover")
    tour, pieces, leftover = _tour_and_cut(G, H.graph, L, cfg, rng.random(), stages)
    for P in removed:
        pieces.extend(split_evenly(P, L))
    return pieces, leftover


def _precheck(G: MultiGraph, ell: int, cfg: PipelineConfig, need: int, eulerian: bool) -> int:
    if ell < 2:
        raise PreconditionError("ell must be at least 2")
    if G.m == 0:
        raise PreconditionError("graph has no edges")
    if eulerian and not G.is_eulerian():
        raise PreconditionError("graph is not eulerian")
    if G.min_degree() < cfg.min_degree:
        raise PreconditionError(f"minimum degree {G.min_degree()} below the configured threshold {cfg.min_degree}")
    lam = edge_connectivity(G)
    if lam < need:
        raise PreconditionError(f"graph is {lam}-edge-connected; {need} required", connectivity=lam)
    return lam


def _finish(G: MultiGraph, ell: int, pieces, leftover, meta) -> Decomposition:
    D = Decomposition(ell, pieces, leftover, meta)
    bad = D.violations(G)
    if bad:
        raise InvariantViolation(f"decomposition failed verification: {bad[:3]}", stage="verify")
    return D


def _with_retries(run, cfg: PipelineConfig, label: str):
    rng = random.Random(cfg.seed)
    failures = []
    for attempt in range(cfg.attempts):
        stages: dict = {}
        try:
            return run(rng.random(), stages), stages, attempt, failures
        except BudgetExhausted as exc:
            log.info("%s attempt %d failed: %s", label, attempt, exc)
            failures.append({"stage": exc.stage, "message": exc.message})
            last = exc
    last.details["failures"] = failures
    raise last


def decompose_24(G: MultiGraph, cfg: PipelineConfig | None = None, ell: int | None = None) -> Decomposition:
    """Decompose a 24-edge-connected graph into ell-paths plus one shorter path."""
    cfg = cfg or PipelineConfig()
    ell = ell if ell is not None else cfg.ell
    lam = _precheck(G, ell, cfg, 24, eulerian=False)
    L = ell if ell % 2 == 0 else 2 * ell
    t = time.perf_counter()
    (pieces, leftover), stages, attempt, failures = _with_retries(
        lambda s, st: _decompose_24_once(G, L, cfg, s, st), cfg, "decompose")
    if L != ell:
        pieces, leftover = _refine(pieces, leftover, ell)
    stages["run"] = {"attempt": attempt, "failures": failures, "working_length": L, "connectivity": lam,
                     "seconds": round(time.perf_counter() - t, 3)}
    return _finish(G, ell, pieces, leftover, {"seed": cfg.seed, "config": cfg.to_dict(), "stages": stages})


# ---------------------------------------------------------------------------
# eulerian graphs
# ---------------------------------------------------------------------------


def _eulerian_cover(G: MultiGraph, ell: int, cfg: PipelineConfig, seed, stages: dict) -> PathGraph:
    rng = random.Random(seed)
    trees = _arborescence_parts(G, 2, cfg, rng.random(), stages)
    G1 = G.subgraph(trees[0].edge_ids() | trees[1].edge_ids())
    G2 = G.without(G1.ends)
    with _stage("cover", stages):
        H = cover_llp1(G1, G2, ell, cfg.cover(ell), seed=rng.random())
    stages["cover"].update(checks=H.checks, conf=H.stats["conf"], lengths=dict(H.graph.lengths()))
    _check_ledger(G, {"H": H.graph.edge_ids()}, "cover")
    if not H.graph.is_eulerian():
        raise InvariantViolation("path-graph of an eulerian graph is not eulerian", stage="cover")
    return H.graph


def _tour_once(G: MultiGraph, ell: int, cfg: PipelineConfig, seed, stages: dict) -> Tour:
    rng = random.Random(seed)
    H = _eulerian_cover(G, ell, cfg, rng.random(), stages)
    with _stage("tour", stages):
        tour = euler_tour_nonconflicting(H, seed=rng.random(), budget=cfg.tour_budget)
    bad = window_violations(tour.vertices(), ell)
    stages["tour"]["short_cycles"] = bad
    if bad:
        raise InvariantViolation(f"tour has {bad} closed subwalks of length at most {ell}", stage="window")
    return tour


def _eulerian_pre(G: MultiGraph, ell: int, cfg: PipelineConfig) -> int:
    lam = _precheck(G, ell, cfg, 4, eulerian=True)
    if ell + 4 > G.n:
        raise PreconditionError(f"paths of length up to {ell + 3} need more than {G.n} vertices")
    return lam


def euler_tour_no_short_cycle(G: MultiGraph, ell: int | None = None, cfg: PipelineConfig | None = None) -> Tour:
    """Euler tour of G in which no closed subwalk has length at most ell."""
    cfg = cfg or PipelineConfig()
    ell = ell if ell is not None else cfg.ell
    _eulerian_pre(G, ell, cfg)
    tour, _, _, _ = _with_retries(lambda s, st: _tour_once(G, ell, cfg, s, st), cfg, "tour")
    return tour


def decompose_eulerian4(G: MultiGraph, cfg: PipelineConfig | None = None, ell: int | None = None) -> Decomposition:
    """Decompose a 4-edge-connected eulerian graph into ell-paths plus one shorter path.

    The tour is closed, so it is cut directly; its last partial slice is
    the leftover.
    """
    cfg = cfg or PipelineConfig()
    ell = ell if ell is not None else cfg.ell
    lam = _eulerian_pre(G, ell, cfg)
    t = time.perf_counter()
    tour, stages, attempt, failures = _with_retries(lambda s, st: _tour_once(G, ell, cfg, s, st), cfg, "eulerian")
    with _stage("cut", stages):
        pieces, leftover = cut_tour(tour, ell)
    stages["run"] = {"attempt": attempt, "failures": failures, "connectivity": lam,
                     "seconds": round(time.perf_counter() - t, 3)}
    return _finish(G, ell, pieces, leftover, {"seed": cfg.seed, "config": cfg.to_dict(), "stages": stages})
