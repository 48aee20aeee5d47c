import os
import subprocess
import sys

import numpy as np
import pytest

from fpplab import kernels
from fpplab.fpp import WeightedGraph, assign_weights
from fpplab.graph import Multigraph, is_connected, pair_half_edges, sample_simple

from oracles import brute_force_distances


@pytest.fixture(scope="module")
def graph():
    g, _ = sample_simple(np.full(600, 3), 21)
    return g, assign_weights(g, 1.0, 21)


def test_dijkstra_against_oracle(backend):
    edges = [(0, 1), (1, 2), (0, 2), (2, 3), (3, 3), (1, 3), (1, 3)]
    w = [1.0, 0.25, 2.0, 0.5, 0.1, 3.0, 0.6]
    g = Multigraph(5, edges)  # vertex 4 isolated
    sw = WeightedGraph(g, w).slot_weights
    indptr, nbr, _ = g.csr
    oracle = brute_force_distances(5, edges, w)
    for s in range(5):
        assert np.array_equal(backend.dijkstra(indptr, nbr, sw, s), oracle[s])


def test_backends_agree(graph):
    g, wg = graph
    indptr, nbr, _ = g.csr
    mods = list(kernels.backends().values())
    src = np.arange(0, g.n, 7, dtype=np.int64)
    ref = mods[0]
    for mod in mods[1:]:
        assert np.array_equal(ref.dijkstra(indptr, nbr, wg.slot_weights, 5),
                              mod.dijkstra(indptr, nbr, wg.slot_weights, 5))
        assert np.array_equal(ref.weighted_eccentricities(indptr, nbr, wg.slot_weights, src),
                              mod.weighted_eccentricities(indptr, nbr, wg.slot_weights, src))
        assert np.array_equal(ref.bfs(indptr, nbr, 3), mod.bfs(indptr, nbr, 3))
        assert np.array_equal(ref.hop_eccentricities(indptr, nbr, src),
                              mod.hop_eccentricities(indptr, nbr, src))
        la, ca = ref.component_labels(indptr, nbr)
        lb, cb = mod.component_labels(indptr, nbr)
        assert ca == cb and np.array_equal(la, lb)


def _push(mod, g, seed, record):
    indptr, nbr, _ = g.csr
    rng = np.random.default_rng(seed)
    first = float(rng.standard_exponential())
    return mod.async_push(indptr, nbr, 0, first,
                          lambda k: (rng.random(k), rng.standard_exponential(2 * k)), 64, record)


@pytest.mark.parametrize("seed", range(3))
def test_async_push_backends_identical(seed):
    g = pair_half_edges(np.full(300, 3), seed)  # multigraph, self-loops allowed
    if not is_connected(g):
        pytest.skip("disconnected draw")
    outs = [_push(mod, g, seed, True) for mod in kernels.backends().values()]
    a = outs[0]
    for b in outs[1:]:
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1]) and a[2] == b[2]
        for xa, xb in zip(a[3], b[3]):
            assert np.array_equal(np.concatenate(xa), np.concatenate(xb))


def test_disconnected_markers(backend):
    g = Multigraph(4, [[0, 1], [2, 3]])
    indptr, nbr, _ = g.csr
    assert backend.hop_eccentricities(indptr, nbr, np.array([0, 2])).tolist() == [-1, -1]
    assert backend.bfs(indptr, nbr, 0).tolist() == [0, 1, -1, -1]
    labels, count = backend.component_labels(indptr, nbr)
    assert count == 2 and labels.tolist() == [0, 0, 1, 1]


def test_env_forces_fallback():
    code = "from fpplab import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, FPPLAB_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"
