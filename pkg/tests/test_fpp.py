import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpplab import kernels
from fpplab.errors import DisconnectedGraphError
from fpplab.fpp import (WeightedGraph, assign_weights, bounded_max_eccentricity, count_bad_vertices,
                        flood_time, hop_diameter, hop_distances, shortest_weighted_distances,
                        weighted_diameter, weighted_eccentricities)
from fpplab.graph import Multigraph, pair_half_edges, sample_simple

from oracles import brute_force_distances, brute_force_hops


def path3():
    return WeightedGraph(Multigraph(3, [[0, 1], [1, 2]]), [0.5, 0.2])


def test_path_distances():
    wg = path3()
    d = shortest_weighted_distances(wg, 0).dist
    assert d.tolist() == [0.0, 0.5, 0.7]
    assert flood_time(wg, 0) == 0.7
    assert flood_time(wg, 1) == 0.5
    assert weighted_diameter(wg) == 0.7
    assert weighted_diameter(wg, method="all") == 0.7


def test_hop_small():
    assert hop_diameter(Multigraph(3, [[0, 1], [1, 2]])) == 2
    assert hop_diameter(Multigraph(3, [[0, 1], [1, 2], [2, 0]])) == 1


def test_weights_deterministic_and_positive():
    g = pair_half_edges(np.full(50, 3), 0)
    a = assign_weights(g, 1.0, 9).weights
    b = assign_weights(g, 1.0, 9).weights
    assert np.array_equal(a, b)
    assert (a > 0).all()


def test_weight_mean():
    w = assign_weights(Multigraph(2, np.zeros((10**6, 2), dtype=int)), 1.0, 3).weights
    assert abs(w.mean() - 1.0) < 0.01


def test_rate_validation():
    with pytest.raises(ValueError):
        assign_weights(Multigraph(2, [[0, 1]]), 0.0)
    with pytest.raises(ValueError):
        WeightedGraph(Multigraph(2, [[0, 1]]), [0.0])


def _complete(n):
    return [(u, v) for u in range(n) for v in range(u + 1, n)]


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("seed", range(5))
def test_complete_graph_brute_force(n, seed):
    edges = _complete(n)
    rng = np.random.default_rng(seed)
    w = rng.random(len(edges)) + 0.01
    oracle = brute_force_distances(n, edges, w.tolist())
    wg = WeightedGraph(Multigraph(n, edges), w)
    for s in range(n):
        assert np.array_equal(shortest_weighted_distances(wg, s).dist, oracle[s])
    assert weighted_diameter(wg) == oracle.max()
    assert weighted_diameter(wg, method="all") == oracle.max()


def test_multigraph_brute_force():
    # parallel edges and a self-loop: the lighter parallel copy wins, the loop never matters
    edges = [(0, 1), (0, 1), (1, 2), (2, 2), (2, 3), (0, 3)]
    w = [0.9, 0.3, 0.4, 0.01, 0.5, 2.0]
    oracle = brute_force_distances(4, edges, w)
    wg = WeightedGraph(Multigraph(4, edges), w)
    for s in range(4):
        assert np.allclose(shortest_weighted_distances(wg, s).dist, oracle[s], rtol=0, atol=1e-15)


def test_hops_brute_force():
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (1, 3)]
    oracle = brute_force_hops(5, edges)
    g = Multigraph(5, edges)
    for s in range(5):
        assert hop_distances(g, s).tolist() == oracle[s].astype(int).tolist()
    assert hop_diameter(g) == int(oracle.max())


def test_disconnected_errors():
    wg = WeightedGraph(Multigraph(4, [[0, 1], [2, 3]]), [1.0, 1.0])
    with pytest.raises(DisconnectedGraphError) as info:
        flood_time(wg, 0)
    assert info.value.vertex in (2, 3)
    d = shortest_weighted_distances(wg, 0)
    assert np.isinf(d.dist[2]) and not d.reachable[3]
    with pytest.raises(DisconnectedGraphError):
        weighted_diameter(wg)
    with pytest.raises(DisconnectedGraphError):
        hop_diameter(wg.base)


@settings(max_examples=25, deadline=None)
@given(st.integers(4, 120), st.integers(0, 2**32))
def test_triangle_consistency_and_order_stats(n, seed):
    g = pair_half_edges(np.full(n if n % 2 == 0 else n + 1, 3), seed)
    wg = assign_weights(g, 1.0, seed)
    prof = shortest_weighted_distances(wg, 0)
    d = prof.dist
    assert d[0] == 0.0
    for (u, v), w in zip(g.edges.tolist(), wg.weights.tolist()):
        if np.isfinite(d[u]) or np.isfinite(d[v]):
            assert d[v] <= d[u] + w and d[u] <= d[v] + w
    ks = [prof.hitting_time(k) for k in range(1, int(prof.reachable.sum()) + 1)]
    assert ks[0] == 0.0 and ks == sorted(ks)


@settings(max_examples=25, deadline=None)
@given(st.integers(6, 300), st.integers(0, 2**32), st.sampled_from([3, 4]))
def test_bounding_diameter_matches_all_sources(n, seed, r):
    if n * r % 2:
        n += 1
    g, _ = sample_simple(np.full(n, r), seed)
    try:
        wg = assign_weights(g, 1.0, seed)
        exact = weighted_diameter(wg, method="all")
    except DisconnectedGraphError:
        return
    assert weighted_diameter(wg) == exact
    assert exact == max(flood_time(wg, s) for s in range(n))
    assert hop_diameter(g) == hop_diameter(g, method="all")


def test_diameter_dominates_flood():
    g, _ = sample_simple(np.full(400, 3), 4)
    wg = assign_weights(g, 1.0, 4)
    diam = weighted_diameter(wg)
    for s in range(0, 400, 37):
        assert diam >= flood_time(wg, s)
    assert hop_diameter(g) >= hop_distances(g, 0).max()


def test_threaded_eccentricities_match():
    g, _ = sample_simple(np.full(300, 3), 8)
    wg = assign_weights(g, 1.0, 8)
    assert np.array_equal(weighted_eccentricities(wg, threads=1), weighted_eccentricities(wg, threads=3))


def test_bounded_max_prunes():
    g, _ = sample_simple(np.full(2000, 3), 1)
    wg = assign_weights(g, 1.0, 1)
    indptr, nbr, _ = g.csr
    value, runs = bounded_max_eccentricity(
        g.n, lambda v: kernels.dijkstra(indptr, nbr, wg.slot_weights, v), slack=1e-9)
    assert runs < g.n // 2
    assert value == weighted_diameter(wg, method="all")


def test_bad_vertices_extremes():
    g = pair_half_edges(np.full(100, 3), 2)
    wg = assign_weights(g, 1.0, 2)
    assert count_bad_vertices(wg, 0.0) == 100
    assert count_bad_vertices(wg, math.inf) == 0


def test_bad_vertices_threshold():
    g = Multigraph(4, [[0, 1], [0, 2], [0, 3], [1, 2], [2, 3], [1, 3]])
    wg = WeightedGraph(g, [5.0, 5.0, 5.0, 0.1, 5.0, 5.0])
    # all degree 3; vertex 0 and vertex 3 have every incident weight above 1
    assert count_bad_vertices(wg, 1.0) == 2


def test_profile_csv():
    text = shortest_weighted_distances(path3(), 0).to_csv().splitlines()
    assert text[0] == "source,vertex,dist"
    assert text[3] == "0,2,0.69999999999999996"


@pytest.mark.slow
def test_typical_distance_fluctuations_bounded():
    # dist(a, b) - log n / (nu - 1) converges in law, so its spread must not grow with n
    variances = []
    for n in (2**10, 2**12, 2**14):
        vals = []
        rng = np.random.default_rng(n)
        for _ in range(300):
            g, _ = sample_simple(np.full(n, 3), rng)
            wg = assign_weights(g, 1.0, rng)
            a, b = rng.choice(n, 2, replace=False)
            vals.append(shortest_weighted_distances(wg, a).dist[b] - math.log(n))
        variances.append(np.var(vals, ddof=1))
    assert max(variances) < 1.5 * min(variances)
