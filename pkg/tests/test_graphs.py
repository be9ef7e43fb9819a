import math
from itertools import combinations

import numpy as np
import pytest

from boolearn.graphs import (Graph, GraphError, clique_edge_probability, count_k_cliques, flat_3colorable, gnm,
                             gnp, is_proper_coloring, morph, ring_lattice)


def check_invariants(g: Graph):
    seen = set()
    for u, v in g.edges:
        assert 0 <= u < v < g.n
        assert (u, v) not in seen
        seen.add((u, v))


def test_graph_rejects_bad_edges():
    with pytest.raises(GraphError):
        Graph(3, ((1, 1),))
    with pytest.raises(GraphError):
        Graph(3, ((0, 3),))
    with pytest.raises(GraphError):
        Graph(3, ((0, 1), (1, 0)))


def test_gnp_extremes():
    assert gnp(5, 0.0, 1).num_edges == 0
    assert gnp(5, 1.0, 1).num_edges == 10
    with pytest.raises(GraphError):
        gnp(5, 1.5, 1)


def test_gnp_mean_edges():
    p = 0.2944
    counts = np.array([gnp(50, p, s).num_edges for s in range(1000)])
    expected = 1225 * p  # 360.64
    se = math.sqrt(1225 * p * (1 - p) / 1000)
    assert abs(counts.mean() - expected) < 3 * se


def test_gnp_deterministic():
    assert gnp(20, 0.3, 5) == gnp(20, 0.3, 5)
    assert gnp(20, 0.3, 5) != gnp(20, 0.3, 6)


def test_gnm():
    assert gnm(4, 6, 0).num_edges == 6
    assert gnm(10, 0, 0).num_edges == 0
    for s in range(1000):
        g = gnm(100, 400, s)
        assert g.num_edges == 400
    check_invariants(g)
    with pytest.raises(GraphError):
        gnm(4, 7, 0)


def test_ring_lattice():
    assert ring_lattice(100, 8).num_edges == 400
    assert set(ring_lattice(5, 2).edges) == {(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)}
    assert ring_lattice(6, 4).adjacency()[0] == {1, 2, 4, 5}
    with pytest.raises(GraphError):
        ring_lattice(10, 3)
    with pytest.raises(GraphError):
        ring_lattice(4, 4)


def test_flat_3colorable_sizes():
    g, colors = flat_3colorable(30, 60, 0)
    assert g.n == 30 and g.num_edges == 60
    assert is_proper_coloring(g, colors)
    t, c = flat_3colorable(3, 3, 0)
    assert set(t.edges) == {(0, 1), (0, 2), (1, 2)}
    assert sorted(c) == [0, 1, 2]


@pytest.mark.parametrize("seed", range(100))
def test_flat_planted_coloring_proper_and_balanced(seed):
    n = 3 * (2 + seed % 20)
    m = min(seed * 3 + 1, 3 * (n // 3) ** 2)
    g, colors = flat_3colorable(n, m, seed)
    check_invariants(g)
    assert g.num_edges == m
    assert is_proper_coloring(g, colors)
    assert np.bincount(colors, minlength=3).tolist() == [n // 3] * 3
    pair_counts = {}
    for u, v in g.edges:
        key = tuple(sorted((colors[u], colors[v])))
        pair_counts[key] = pair_counts.get(key, 0) + 1
    vals = [pair_counts.get(k, 0) for k in ((0, 1), (0, 2), (1, 2))]
    assert max(vals) - min(vals) <= 1


def test_flat_infeasible():
    with pytest.raises(GraphError):
        flat_3colorable(6, 13, 0)
    with pytest.raises(GraphError):
        flat_3colorable(7, 13, 0)  # classes 3,2,2: the 2-2 pair holds only 4 edges
    with pytest.raises(GraphError):
        flat_3colorable(2, 0, 0)


@pytest.mark.parametrize("n,m", [(50, 115), (100, 239), (125, 301), (175, 417), (200, 479), (7, 12)])
def test_flat_uneven_classes(n, m):
    g, colors = flat_3colorable(n, m, 1)
    assert g.num_edges == m and is_proper_coloring(g, colors)
    assert sorted(np.bincount(colors).tolist()) == sorted([len(c) for c in np.array_split(np.arange(n), 3)])


def test_morph_endpoints():
    g1, g2 = gnm(100, 400, 1), ring_lattice(100, 8)
    assert morph(g1, g2, 1.0, 3).edge_set() == g1.edge_set()
    assert morph(g1, g2, 0.0, 3).edge_set() == g2.edge_set()


@pytest.mark.parametrize("r", [1, 0.5, 0.25, 0.125, 2**-4, 2**-5, 2**-6, 2**-7, 2**-8, 0])
def test_morph_preserves_edge_count(r):
    g1, g2 = gnm(100, 400, 7), ring_lattice(100, 8)
    for s in range(5):
        g = morph(g1, g2, r, s)
        check_invariants(g)
        assert g.num_edges == 400
        e1, e2 = g1.edge_set(), g2.edge_set()
        assert e1 & e2 <= g.edge_set() <= e1 | e2
        assert len(g.edge_set() & (e1 - e2)) == math.floor(r * len(e1 - e2) + 0.5)


def test_morph_deterministic_and_mismatch():
    g1, g2 = gnm(30, 60, 1), ring_lattice(30, 4)
    assert morph(g1, g2, 0.3, 9) == morph(g1, g2, 0.3, 9)
    with pytest.raises(GraphError):
        morph(g1, ring_lattice(31, 4), 0.5, 0)


@pytest.mark.parametrize("n,p", [(50, 0.2944), (100, 0.1457), (150, 0.0968)])
def test_clique_edge_probability(n, p):
    assert abs(clique_edge_probability(n, 3, 500) - p) <= 1e-4


def test_clique_probability_edge_cases():
    assert clique_edge_probability(10, 4, math.comb(10, 4)) == pytest.approx(1.0)
    with pytest.raises(GraphError):
        clique_edge_probability(5, 3, 11)


def brute_cliques(g, k):
    adj = g.edge_set()
    return sum(all((a, b) in adj for a, b in combinations(s, 2)) for s in combinations(range(g.n), k))


def test_count_k_cliques_basic():
    k5 = gnp(5, 1.0, 0)
    assert count_k_cliques(k5, 3) == 10
    assert count_k_cliques(Graph(6, ()), 3) == 0


@pytest.mark.parametrize("seed", range(20))
def test_count_k_cliques_matches_brute_force(seed):
    g = gnp(12, 0.5, seed)
    for k in (1, 2, 3, 4):
        assert count_k_cliques(g, k) == brute_cliques(g, k)


def test_expected_triangles_at_computed_p():
    p = clique_edge_probability(50, 3, 500)
    counts = np.array([count_k_cliques(gnp(50, p, s), 3) for s in range(500)])
    se = counts.std(ddof=1) / math.sqrt(len(counts))
    assert abs(counts.mean() - 500) < 3 * se
