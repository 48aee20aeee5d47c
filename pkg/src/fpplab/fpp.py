"""First-passage percolation: exponential edge weights and weighted distances."""
from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from fpplab import kernels
from fpplab.errors import DisconnectedGraphError
from fpplab.graph import Multigraph


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    base: Multigraph
    weights: np.ndarray
    rate: float = 1.0

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        if w.shape != (self.base.num_edges,):
            raise ValueError(f"expected {self.base.num_edges} weights, got {w.shape}")
        if w.size and not (w > 0).all():
            raise ValueError("edge weights must be strictly positive")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.base.n

    @cached_property
    def slot_weights(self) -> np.ndarray:
        _, _, eid = self.base.csr
        w = np.ascontiguousarray(self.weights[eid])
        w.setflags(write=False)
        return w


@dataclass(frozen=True, eq=False)
class DistanceProfile:
    source: int
    dist: np.ndarray

    @property
    def reachable(self) -> np.ndarray:
        return np.isfinite(self.dist)

    def hitting_time(self, k: int) -> float:
        """T(k): the k-th smallest distance, i.e. the time the ball first holds k vertices."""
        if not 1 <= k <= self.dist.size:
            raise ValueError(f"k={k} outside 1..{self.dist.size}")
        return float(np.partition(self.dist, k - 1)[k - 1])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["source", "vertex", "dist"])
        for v, d in enumerate(self.dist.tolist()):
            w.writerow([self.source, v, f"{d:.17g}"])
        return buf.getvalue()


def exponential_weights(num: int, scale: float, rng: np.random.Generator) -> np.ndarray:
    # -ln(U) * scale with U on (0, 1]
    return -np.log1p(-rng.random(num)) * scale


def assign_weights(g: Multigraph, rate: float = 1.0, seed=None) -> WeightedGraph:
    """I.i.d. Exp(rate) weights, one per edge, drawn as ``-ln(U)/rate``."""
    if not rate > 0:
        raise ValueError("rate must be positive")
    rng = np.random.default_rng(seed)
    return WeightedGraph(g, exponential_weights(g.num_edges, 1.0 / rate, rng), rate)


def _check_source(n: int, source: int) -> int:
    source = int(source)
    if not 0 <= source < n:
        raise IndexError(f"source {source} out of range 0..{n - 1}")
    return source


def shortest_weighted_distances(wg: WeightedGraph, source: int) -> DistanceProfile:
    source = _check_source(wg.n, source)
    indptr, nbr, _ = wg.base.csr
    return DistanceProfile(source, kernels.dijkstra(indptr, nbr, wg.slot_weights, source))


def flood_time(wg: WeightedGraph, source: int) -> float:
    prof = shortest_weighted_distances(wg, source)
    unreached = np.flatnonzero(~prof.reachable)
    if unreached.size:
        raise DisconnectedGraphError(int(unreached[0]), source)
    return float(prof.dist.max())


def _resolve_threads(threads: int | None) -> int:
    env = os.environ.get("FPPLAB_THREADS")
    if env:
        return max(1, int(env))
    return max(1, threads or 1)


def _fan_out(fn, sources: np.ndarray, threads: int) -> np.ndarray:
    if threads == 1 or sources.size < 2 * threads:
        return fn(sources)
    chunks = np.array_split(sources, threads * 4)
    with ThreadPoolExecutor(threads) as pool:
        return np.concatenate(list(pool.map(fn, chunks)))


def weighted_eccentricities(wg: WeightedGraph, sources=None, threads: int | None = None) -> np.ndarray:
    indptr, nbr, _ = wg.base.csr
    slot_w = wg.slot_weights
    src = np.arange(wg.n, dtype=np.int64) if sources is None else np.asarray(sources, dtype=np.int64)
    return _fan_out(lambda s: kernels.weighted_eccentricities(indptr, nbr, slot_w, s),
                    src, _resolve_threads(threads))


def _require_connected(g: Multigraph) -> None:
    indptr, nbr, _ = g.csr
    labels, count = kernels.component_labels(indptr, nbr)
    if count > 1:
        raise DisconnectedGraphError(int(np.flatnonzero(labels != labels[0])[0]), 0)


def bounded_max_eccentricity(n: int, run, slack: float = 0.0) -> tuple[float, int]:
    """Exact ``max_v ecc(v)`` with eccentricity bounds pruning most sources.

    ``run(v)`` returns the distance array from ``v``. After each run, every
    vertex ``w`` gets ``ecc(w) >= max(d(v,w), ecc(v) - d(v,w))`` and
    ``ecc(w) <= ecc(v) + d(v,w)``; ``w`` is dropped once its upper bound falls
    below the best eccentricity seen (minus ``slack``, relative, which absorbs
    floating-point rounding of the bound). Sources alternate between the
    largest upper bound and the smallest lower bound. Returns the maximum and
    the number of runs used.
    """
    lower = np.zeros(n)
    upper = np.full(n, np.inf)
    alive = np.ones(n, dtype=bool)
    best = -np.inf
    runs = 0
    pick_high = True
    while True:
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            return float(best), runs
        v = int(idx[np.argmax(upper[idx])] if pick_high else idx[np.argmin(lower[idx])])
        pick_high = not pick_high
        d = np.asarray(run(v), dtype=np.float64)
        runs += 1
        ecc = d.max()
        best = max(best, ecc)
        np.maximum(lower, np.maximum(d, ecc - d), out=lower)
        np.minimum(upper, ecc + d, out=upper)
        alive[v] = False
        alive &= upper > best * (1.0 - slack)


def weighted_diameter(wg: WeightedGraph, threads: int | None = None, method: str = "bounding") -> float:
    """Exact weighted diameter.

    ``method="all"`` runs Dijkstra from every vertex; ``"bounding"`` (default)
    prunes sources with eccentricity bounds and returns the identical value.
    """
    _require_connected(wg.base)
    if method == "all":
        return float(weighted_eccentricities(wg, threads=threads).max())
    if method != "bounding":
        raise ValueError(f"unknown method {method!r}")
    indptr, nbr, _ = wg.base.csr
    slot_w = wg.slot_weights
    value, _ = bounded_max_eccentricity(
        wg.n, lambda v: kernels.dijkstra(indptr, nbr, slot_w, v), slack=1e-9)
    return value


def hop_distances(g: Multigraph, source: int) -> np.ndarray:
    """Hop counts from ``source``; -1 marks unreachable vertices."""
    source = _check_source(g.n, source)
    indptr, nbr, _ = g.csr
    return kernels.bfs(indptr, nbr, source)


def hop_eccentricities(g: Multigraph, sources=None, threads: int | None = None) -> np.ndarray:
    indptr, nbr, _ = g.csr
    src = np.arange(g.n, dtype=np.int64) if sources is None else np.asarray(sources, dtype=np.int64)
    return _fan_out(lambda s: kernels.hop_eccentricities(indptr, nbr, s),
                    src, _resolve_threads(threads))


def hop_diameter(g: Multigraph, threads: int | None = None, method: str = "bounding") -> int:
    _require_connected(g)
    if method == "all":
        return int(hop_eccentricities(g, threads=threads).max())
    if method != "bounding":
        raise ValueError(f"unknown method {method!r}")
    indptr, nbr, _ = g.csr
    value, _ = bounded_max_eccentricity(g.n, lambda v: kernels.bfs(indptr, nbr, v))
    return int(value)


def count_bad_vertices(wg: WeightedGraph, s: float) -> int:
    """Number of minimum-degree vertices whose incident weights all exceed ``s``."""
    deg = wg.base.degrees
    if wg.n == 0:
        return 0
    d_min = int(deg.min())
    if d_min == 0:
        return 0
    indptr = wg.base.csr[0]
    lightest = np.minimum.reduceat(wg.slot_weights, indptr[:-1])
    return int(np.count_nonzero((deg == d_min) & (lightest > s)))
