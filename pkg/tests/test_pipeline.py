import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathdecomp.errors import BudgetExhausted, InvariantViolation, PreconditionError
from pathdecomp.graph import MultiGraph
from pathdecomp.pathgraph import Path, PathGraph, Tour, euler_tour_nonconflicting
from pathdecomp.pathtrees import cover_llp1
from pathdecomp.pipeline import (Decomposition, PipelineConfig, _refine, cut_tour, decompose_24, decompose_eulerian4,
                                 euler_tour_no_short_cycle, split_evenly, window_violations)
from pathdecomp.verify import gen_circulant, verify_decomposition

from helpers import circulant_pairs, split_host


def brute_windows(verts, ell):
    seq = verts[:-1]
    m = len(seq)
    return sum(1 for i in range(m) for t in range(1, min(ell, m - 1) + 1) if seq[i] == seq[(i + t) % m])


# --- cutting ------------------------------------------------------------------

def test_cut_tour_on_path_boundaries():
    G = gen_circulant(12, [1])
    paths = [Path(tuple(range(3 * k, 3 * k + 4)) if k < 3 else (9, 10, 11, 0),
                  tuple(e for e in range(3 * k, 3 * k + 3))) for k in range(4)]
    H = PathGraph(G, paths)
    pieces, leftover = cut_tour(euler_tour_nonconflicting(H, seed=0), 3)
    assert leftover is None and len(pieces) == 4
    assert sorted(tuple(sorted(P.edges)) for P in pieces) == sorted(tuple(sorted(P.edges)) for P in paths)


def test_cut_tour_with_dummy():
    G = MultiGraph.from_edges(12, [(i, i + 1) for i in range(11)])
    host = [Path((0, 1, 2, 3), (0, 1, 2)), Path((3, 4, 5, 6), (3, 4, 5)), Path((6, 7, 8, 9), (6, 7, 8)),
            Path((9, 10, 11), (9, 10))]
    dummy = Path((11, 12, 13, 0), (-1, -2, -3), virtual=True)
    H = PathGraph(G, host + [dummy])
    pieces, leftover = cut_tour(euler_tour_nonconflicting(H, seed=0), 3, dummy=4)
    assert [len(P) for P in pieces] == [3, 3, 3]
    assert leftover is not None and len(leftover) == 2
    D = Decomposition(3, pieces, leftover)
    assert D.violations(G) == []


def test_cut_tour_detects_short_cycle_slice():
    G = MultiGraph.from_edges(3, [(0, 1), (1, 2), (2, 0)])
    H = PathGraph(G, [Path.edge(0, 0, 1), Path.edge(1, 1, 2), Path.edge(2, 2, 0)])
    tour = Tour(H, [(0, True), (1, True), (2, True)])
    with pytest.raises(InvariantViolation):
        cut_tour(tour, 3)


def cover_tours(count: int, ell: int = 3):
    """Tours of cover path-graphs (lengths in [ell, ell+3]) on small circulants; budget failures are skipped."""
    cfg = PipelineConfig()
    s, tries = 0, 4 * count
    while count and s < tries:
        n, K = 46 + 2 * (s % 6), 16
        pairs = circulant_pairs(n, range(1, K + 1))
        G1, G2 = split_host(pairs[:2 * n], pairs[2 * n:], n)
        s += 1
        try:
            H = cover_llp1(G1, G2, ell, cfg.cover(ell), seed=s)
            tour = euler_tour_nonconflicting(H.graph, seed=s)
        except BudgetExhausted:
            continue
        count -= 1
        yield H.graph, tour, ell


def test_cut_generated_tours_are_simple():
    count = 0
    for H, tour, ell in cover_tours(100):
        pieces, leftover = cut_tour(tour, ell)
        assert all(P.is_simple() and len(P) == ell for P in pieces)
        assert sorted(e for P in pieces + ([leftover] if leftover else []) for e in P.edges) == sorted(H.edge_ids())
        count += 1
    assert count == 100


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=2, max_size=30), st.integers(1, 8))
def test_window_violations_match_brute_force(seq, ell):
    verts = seq + [seq[0]]
    assert window_violations(verts, ell) == brute_windows(verts, ell)


def test_split_and_refine():
    P = Path(tuple(range(7)), tuple(range(6)))
    assert [Q.verts for Q in split_evenly(P, 3)] == [(0, 1, 2, 3), (3, 4, 5, 6)]
    with pytest.raises(InvariantViolation):
        split_evenly(P, 4)
    paths, leftover = _refine([P], Path((6, 7, 8, 9, 10), (6, 7, 8, 9)), 3)
    assert [len(Q) for Q in paths] == [3, 3, 3] and len(leftover) == 1
    paths, leftover = _refine([], Path((0, 1, 2, 3), (0, 1, 2)), 3)
    assert len(paths) == 1 and leftover is None


# --- configuration ------------------------------------------------------------

def test_config_validation():
    with pytest.raises(PreconditionError):
        PipelineConfig(ell=1)
    with pytest.raises(PreconditionError):
        PipelineConfig(eps=1.5)
    with pytest.raises(PreconditionError):
        PipelineConfig(private_rule="left")
    with pytest.raises(PreconditionError):
        PipelineConfig(l2l_fraction=Fraction(3, 4))
    with pytest.raises(PreconditionError):
        PipelineConfig.from_dict({"ell": 3, "colour": 2})


def test_config_roundtrip_and_asymptotic():
    cfg = PipelineConfig(ell=4, seed=9, l2l_fraction="1/4")
    again = PipelineConfig.from_dict(cfg.to_dict())
    assert again == cfg and again.l2l_fraction == Fraction(1, 4)
    asym = PipelineConfig.asymptotic(ell=3)
    assert asym.cover_fraction is None and asym.ll1_fraction is None
    assert asym.growth == 4 and asym.private_rule == "out" and asym.l2l_fraction == Fraction(1, 20)
    assert asym.cover(3).fraction is None


# --- highly edge-connected graphs -----------------------------------------------

def test_decompose_24_rejects_low_connectivity():
    with pytest.raises(PreconditionError) as info:
        decompose_24(gen_circulant(5, [1]), PipelineConfig(ell=3))
    assert info.value.details["connectivity"] == 2


def test_decompose_24_min_degree_gate():
    with pytest.raises(PreconditionError):
        decompose_24(gen_circulant(60, range(1, 13)), PipelineConfig(ell=3, min_degree=100))


def test_decompose_24_budget_failure_carries_stage():
    with pytest.raises(BudgetExhausted) as info:
        decompose_24(gen_circulant(60, range(1, 14)), PipelineConfig(ell=4, attempts=1))
    assert info.value.stage
    assert info.value.details["failures"]


# --- eulerian graphs -------------------------------------------------------------

def test_eulerian_decomposition_exact():
    G = gen_circulant(100, range(1, 16))
    D = decompose_eulerian4(G, PipelineConfig(ell=3, seed=0))
    assert len(D.paths) == 500 and D.leftover is None
    assert D.violations(G) == []
    assert verify_decomposition(G, D, 3).verdict


def test_eulerian_decomposition_leftover_two():
    G = gen_circulant(100, range(1, 21))
    assert G.m % 3 == 2
    D = decompose_eulerian4(G, PipelineConfig(ell=3, seed=0))
    assert len(D.paths) == 666 and len(D.leftover) == 2
    assert verify_decomposition(G, D, 3).verdict


def test_eulerian_tour_has_no_short_cycles():
    G = gen_circulant(100, range(1, 16))
    tour = euler_tour_no_short_cycle(G, 3, PipelineConfig(seed=1))
    verts = tour.vertices()
    assert len(verts) == G.m + 1 and verts[0] == verts[-1]
    assert sorted(tour.edges()) == sorted(G.ends)
    assert brute_windows(verts, 3) == 0


@pytest.mark.parametrize("G, fragment", [
    (gen_circulant(20, [1, 2, 3]).without([0]), "eulerian"),
    (gen_circulant(30, [1]), "connected"),
    (gen_circulant(6, [1, 2]), "vertices"),
])
def test_eulerian_preconditions(G, fragment):
    with pytest.raises(PreconditionError, match=fragment):
        decompose_eulerian4(G, PipelineConfig(ell=3))


def test_report_and_dot():
    G = gen_circulant(100, range(1, 16))
    D = decompose_eulerian4(G, PipelineConfig(ell=3, seed=0))
    rep = json.loads(D.to_json(G))
    assert set(rep) == {"n", "m", "ell", "seed", "paths", "leftover", "stages", "verified"}
    assert rep["m"] == 1500 and len(rep["paths"]) == 500
    assert "tour" in rep["stages"] and "run" in rep["stages"]
    dot = D.to_dot(G)
    assert dot.startswith("graph decomposition {") and dot.count("--") == G.m


@pytest.mark.slow
def test_decompose_24_end_to_end():
    G = gen_circulant(240, range(1, 81))
    D = decompose_24(G, PipelineConfig(ell=4, seed=0, attempts=1))
    assert len(D.paths) == G.m // 4 and D.leftover is None
    assert verify_decomposition(G, D, 4).verdict
