from collections import Counter
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathdecomp.cones import LL1Params
from pathdecomp.errors import BudgetExhausted, PreconditionError
from pathdecomp.graph import MultiGraph
from pathdecomp.pathgraph import Path, PathGraph
from pathdecomp.pathtrees import (CoverParams, PathTree, TreeParams, bipartite_l2l_tree, cover_llp1,
                                  extend_path_tree, grow_1_ellplus1, parity_subtree, subcubic_12_path_tree)
from pathdecomp.verify import gen_two_edge_connected

from helpers import circulant_pairs, split_host

ANY = TreeParams(growth=1, private_rule="any")
COVER_ANY = CoverParams(fraction=Fraction(1), ll1=LL1Params(fraction=Fraction(1), private_rule="any"))


def check_subcubic(G, T):
    assert T.violations() == []
    assert T.support == frozenset(range(G.n))
    assert T.max_degree() <= 3
    assert set(T.graph.lengths()) <= {1, 2}
    assert all(P.valid_in(G) for P in T.paths)


# --- subcubic (1,2)-path-trees ---------------------------------------------

def test_subcubic_triangle():
    G = MultiGraph.from_edges(3, [(0, 1), (1, 2), (2, 0)])
    T = subcubic_12_path_tree(G, check=True)
    check_subcubic(G, T)
    assert len(T.paths) == 2


def test_subcubic_parallel_pair():
    G = MultiGraph.from_edges(2, [(0, 1), (0, 1)])
    T = subcubic_12_path_tree(G)
    assert [len(P) for P in T.paths] == [1]


def test_subcubic_single_vertex_is_empty_tree():
    assert subcubic_12_path_tree(MultiGraph.from_edges(1, [])).paths == []


def test_subcubic_theta():
    # two hubs joined by three internally disjoint 2-paths
    G = MultiGraph.from_edges(5, [(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 1)])
    check_subcubic(G, subcubic_12_path_tree(G, check=True))


def test_subcubic_star_of_two_paths_needs_two_paths():
    # K_{2,m}: hub degree m, so a subcubic tree must route through 2-paths
    m = 12
    G = MultiGraph.from_edges(m + 2, [(0, i) for i in range(2, m + 2)] + [(1, i) for i in range(2, m + 2)])
    T = subcubic_12_path_tree(G, check=True)
    check_subcubic(G, T)
    assert T.graph.lengths()[2] > 0


@pytest.mark.parametrize("G", [
    MultiGraph.from_edges(3, [(0, 1), (1, 2)]),
    MultiGraph.from_edges(4, [(0, 1), (1, 2), (2, 0)]),
])
def test_subcubic_rejects(G):
    with pytest.raises(PreconditionError):
        subcubic_12_path_tree(G)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(2, 40), extra=st.integers(0, 30), seed=st.integers(0, 10**6))
def test_subcubic_property(n, extra, seed):
    G = gen_two_edge_connected(n, seed=seed, extra=extra)
    check_subcubic(G, subcubic_12_path_tree(G, root=seed % G.n))


def test_subcubic_random_cubic_graphs():
    for s in range(20):
        g = nx.random_regular_graph(3, 20, seed=s)
        if not nx.is_connected(g) or nx.has_bridges(g):
            continue
        G = MultiGraph.from_edges(20, list(g.edges()))
        check_subcubic(G, subcubic_12_path_tree(G))


# --- extension --------------------------------------------------------------

def star_of_two_paths(m: int, copies: int = 4):
    """Spanning (1,2)-path-tree: 2-paths 0-a-b with a parallel 1-path b-a, plus a dense H."""
    n = 2 * m + 1
    tree_pairs = [(0, i) for i in range(1, m + 1)] + [(i, i + m) for i in range(1, m + 1)] * 2
    extra = [(u, v) for u in range(n) for v in range(u + 1, n)] * copies
    G, H = split_host(tree_pairs, extra, n)
    paths = [Path((0, i, i + m), (i - 1, m + i - 1)) for i in range(1, m + 1)]
    paths += [Path((i + m, i), (2 * m + i - 1,)) for i in range(1, m + 1)]
    return PathTree(PathGraph(G, paths), 0, frozenset(range(n))), G, H


def test_extend_single_one_path_unchanged():
    G, H = split_host([(0, 1)], [(0, 1)] * 12, 2)
    T = PathTree(PathGraph(G, [Path((0, 1), (0,))]), 0, frozenset({0, 1}))
    res = extend_path_tree(T, H, 2, seed=1)
    assert [P.edges for P in res.tree.paths] == [(0,)]
    assert res.unused == frozenset(H.ends)


def test_extend_star_of_two_paths():
    T, G, H = star_of_two_paths(4)
    assert T.violations() == []
    res = extend_path_tree(T, H, 2, seed=1)
    lengths = res.tree.graph.lengths()
    assert set(lengths) <= {1, 3} and lengths[3] > 0
    assert res.tree.violations() == []
    used = res.tree.graph.edge_ids()
    assert used | res.unused == set(G.ends) | set(H.ends) and not used & res.unused


def test_extend_degree_bound():
    T, G, H = star_of_two_paths(4)
    with pytest.raises(PreconditionError):
        extend_path_tree(T, H.subgraph(sorted(H.ends)[:30]), 2)


def test_extend_requires_spanning_tree():
    T, G, H = star_of_two_paths(4)
    partial = PathTree(PathGraph(G, T.paths[:4]), 0, frozenset([0, 5, 6, 7, 8]))
    with pytest.raises(PreconditionError):
        extend_path_tree(partial, H, 2)


def k2m_with_dense(ell_seed: int = 4, m: int = 40, d: int = 24):
    n = m + 2
    pairs = [(0, i) for i in range(2, n)] + [(1, i) for i in range(2, n)]
    h = nx.random_regular_graph(d, n, seed=ell_seed)
    return split_host(pairs, list(h.edges()), n)


@pytest.mark.parametrize("ell, d", [(3, 24), (4, 30), (6, 36)])
def test_grow_lengths_and_coverage(ell, d):
    G, H = k2m_with_dense(4, 40, d)
    res = grow_1_ellplus1(G, H, ell, seed=1, growth=1)
    T = res.tree
    assert T.violations() == []
    assert set(T.graph.lengths()) <= {1, ell + 1}
    used = T.graph.edge_ids()
    assert used | res.unused == set(G.ends) | set(H.ends) and not used & res.unused


def test_grow_out_of_private_edges_is_budget_error():
    G, H = k2m_with_dense(4, 40, 6)
    with pytest.raises(BudgetExhausted) as info:
        grow_1_ellplus1(G, H, 4, seed=1, growth=1)
    assert "grow[" in info.value.stage


# --- bipartite (ell, 2 ell)-trees -------------------------------------------

def bipartite_instance(dH: int, a: int = 30):
    n = 2 * a
    A = set(range(a))
    tree = [(i, a) for i in range(a)] + [(i, a + 1) for i in range(a)] + [(j - a, j) for j in range(a + 2, n)] * 2
    dense = [(i, a + (i + j + 5) % a) for j in range(dH) for i in range(a)]
    G, H = split_host(tree, dense, n)
    return G, H, A


@pytest.mark.parametrize("ell, dH, seed", [(2, 12, 1), (2, 12, 2), (4, 30, 1), (4, 30, 2)])
def test_l2l_tree(ell, dH, seed):
    G, H, A = bipartite_instance(dH)
    res = bipartite_l2l_tree(G, H, A, ell, ANY, seed=seed)
    T = res.tree
    assert T.violations() == []
    assert set(T.graph.lengths()) <= {ell, 2 * ell}
    assert A <= T.support
    # even paths join a side to itself
    assert all(P.start in A and P.end in A for P in T.paths)
    used = T.graph.edge_ids()
    assert used | res.unused == set(G.ends) | set(H.ends) and not used & res.unused


def test_l2l_thin_dense_part_exhausts_private_paths():
    # at dH = 24 some seeds run a center out of private 3-paths; this must surface as a budget error
    G, H, A = bipartite_instance(24)
    with pytest.raises(BudgetExhausted) as info:
        bipartite_l2l_tree(G, H, A, 4, ANY, seed=0)
    assert info.value.details["used"] <= info.value.details["supply"]


def test_l2l_preconditions():
    G, H, A = bipartite_instance(12)
    with pytest.raises(PreconditionError):
        bipartite_l2l_tree(G, H, A, 3)
    with pytest.raises(PreconditionError):
        bipartite_l2l_tree(G, H, A - {0}, 2)


# --- cover ------------------------------------------------------------------

def cover_instance(n: int = 60, K: int = 15):
    pairs = circulant_pairs(n, range(1, K + 1))
    return split_host(pairs[:2 * n], pairs[2 * n:], n)


@pytest.mark.parametrize("ell, seed", [(3, 0), (3, 1), (4, 0)])
def test_cover_exact_and_windowed(ell, seed):
    G1, G2 = cover_instance()
    H = cover_llp1(G1, G2, ell, COVER_ANY, seed=seed)
    used = Counter(e for P in H.graph.paths for e in P.edges)
    assert set(used) == set(G1.ends) | set(G2.ends) and set(used.values()) == {1}
    assert all(ell <= len(P) <= ell + 3 for P in H.graph.paths)
    assert H.checks["connected"] and H.checks["lengths"]
    assert H.graph.is_eulerian()


@pytest.mark.xfail(strict=True, reason="measured conf(H) between 2/5 and 1/2 on C_60(1..15); 1/26 needs far larger degree")
def test_cover_conflict_bound_at_desk_scale():
    G1, G2 = cover_instance()
    H = cover_llp1(G1, G2, 3, COVER_ANY, seed=0)
    assert H.graph.conflict_ratio() < Fraction(1, 26)


# --- parity ------------------------------------------------------------------

def _tree(pairs, n, paths):
    return PathTree(PathGraph(MultiGraph.from_edges(n, pairs), paths), 0, frozenset(range(n)))


def test_parity_shadow_path():
    T = _tree([(0, 1), (1, 2)], 3, [Path((0, 1), (0,)), Path((1, 2), (1,))])
    assert sorted(parity_subtree(T, {0, 2})) == [0, 1]
    assert parity_subtree(T, set()) == []


def test_parity_star():
    T = _tree([(0, 1), (0, 2), (0, 3)], 4, [Path((0, 1), (0,)), Path((0, 2), (1,)), Path((0, 3), (2,))])
    assert sorted(parity_subtree(T, {1, 2})) == [0, 1]
    with pytest.raises(PreconditionError):
        parity_subtree(T, {1})


@settings(max_examples=50, deadline=None)
@given(n=st.integers(2, 30), seed=st.integers(0, 10**6), data=st.data())
def test_parity_property(n, seed, data):
    G = gen_two_edge_connected(n, seed=seed)
    T = subcubic_12_path_tree(G)
    X = data.draw(st.lists(st.sampled_from(range(G.n)), unique=True))
    X = X[: len(X) - len(X) % 2]
    F = parity_subtree(T, X)
    deg = Counter(v for i in F for v in T.paths[i].ends)
    assert {v for v, d in deg.items() if d % 2} == set(X)
