"""Push broadcast on graphs: asynchronous Poisson clocks, synchronous rounds,
and the exponential-weight flooding process with the same law on regular graphs.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from fpplab import kernels
from fpplab.errors import DisconnectedGraphError, OutOfScopeError, RegularityError
from fpplab.fpp import WeightedGraph, exponential_weights, shortest_weighted_distances
from fpplab.graph import CompleteGraph, Multigraph, component_labels

LOG_DTYPE = np.dtype([("time", "f8"), ("from", "i8"), ("to", "i8"), ("new", "i1")])


@dataclass(frozen=True, eq=False)
class BroadcastTrace:
    """Outcome of one broadcast run.

    ``inform_time[v]`` is the time (or round) ``v`` learned the message and
    ``parent[v]`` the vertex it learned it from (-1 for the source).
    ``log`` holds every transmission when recording was requested.
    """

    source: int
    inform_time: np.ndarray
    parent: np.ndarray
    kind: str
    events: int = 0
    log: np.ndarray | None = None

    @property
    def completion(self) -> float:
        return float(self.inform_time.max())

    @property
    def n(self) -> int:
        return int(self.inform_time.size)

    def informed_at(self, t: float) -> np.ndarray:
        return np.flatnonzero(self.inform_time <= t)

    def log_csv(self) -> str:
        if self.log is None:
            raise ValueError("trace was run without recording")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time", "from", "to", "newly_informed"])
        for t, u, v, new in self.log.tolist():
            w.writerow([f"{t:.17g}", u, v, int(new)])
        return buf.getvalue()


@dataclass(frozen=True)
class BroadcastConstants:
    """Prefactors of ``log n`` for push broadcast on random r-regular graphs."""

    async_prefactor: float
    sync_prefactor: float
    sync_lower: float


def broadcast_constants(r: int) -> BroadcastConstants:
    if r < 3:
        raise OutOfScopeError(f"degree {r} < 3")
    tail = 1.0 / (r * math.log(1.0 - 1.0 / r))
    return BroadcastConstants(
        async_prefactor=2.0 * (r - 1) / (r - 2),
        sync_prefactor=1.0 / math.log(2.0 * (1.0 - 1.0 / r)) - tail,
        sync_lower=1.0 / math.log(2.0 - 1.0 / r) - tail,
    )


def _require_connected(g) -> None:
    if isinstance(g, CompleteGraph) or g.n <= 1:
        return
    labels, count = component_labels(g)
    if count > 1:
        raise DisconnectedGraphError(int(np.flatnonzero(labels != labels[0])[0]))


def _pack_log(parts) -> np.ndarray:
    log_t, log_f, log_to, log_new = parts
    out = np.empty(sum(len(a) for a in log_t), dtype=LOG_DTYPE)
    if len(out):
        out["time"] = np.concatenate(log_t)
        out["from"] = np.concatenate(log_f)
        out["to"] = np.concatenate(log_to)
        out["new"] = np.concatenate(log_new)
    return out


def async_push(g: Multigraph, source: int, seed=None, record: bool = False) -> BroadcastTrace:
    """Asynchronous push: each informed vertex has a rate-1 Poisson clock and on
    every tick sends to a uniformly chosen neighbour, informed or not.

    Uninformed vertices' clocks never matter, so only informed vertices are
    scheduled. Self-loops in a multigraph are valid (wasted) targets.
    """
    source = int(source)
    if not 0 <= source < g.n:
        raise IndexError(f"source {source} out of range")
    _require_connected(g)
    rng = np.random.default_rng(seed)
    indptr, nbr, _ = g.csr
    first = float(rng.standard_exponential())
    chunk = max(1024, 2 * g.n)

    def draw(k):
        return rng.random(k), rng.standard_exponential(2 * k)

    inform, parent, events, log = kernels.async_push(indptr, nbr, source, first, draw, chunk, record)
    return BroadcastTrace(source, inform, parent, "async", events,
                          _pack_log(log) if record else None)


def coupled_async(g: Multigraph, source: int, seed=None, record: bool = False) -> BroadcastTrace:
    """Broadcast realised as flooding with i.i.d. exponential weights of mean r.

    On an r-regular graph this has the same law as :func:`async_push`. The
    weight of edge ``e`` is ``-ln(U_e) * r``, so with the same seed the times
    are exactly ``r`` times the rate-1 flooding distances (up to rounding).
    """
    if not g.is_regular():
        raise RegularityError("coupled broadcast requires a regular graph")
    _require_connected(g)
    r = int(g.degrees[0])
    rng = np.random.default_rng(seed)
    wg = WeightedGraph(g, exponential_weights(g.num_edges, float(r), rng), 1.0 / r)
    dist = shortest_weighted_distances(wg, source).dist
    indptr, nbr, _ = g.csr
    owner = np.repeat(np.arange(g.n), np.diff(indptr))
    tight = (dist[nbr] + wg.slot_weights == dist[owner]) & (nbr != owner)
    parent = np.full(g.n, -1, dtype=np.int64)
    # slots are grouped by owner; the last tight slot per owner wins, any is valid
    parent[owner[tight]] = nbr[tight]
    parent[source] = -1
    log = None
    if record:
        order = np.argsort(dist, kind="stable")
        order = order[order != source]
        log = np.empty(order.size, dtype=LOG_DTYPE)
        log["time"] = dist[order]
        log["from"] = parent[order]
        log["to"] = order
        log["new"] = 1
    return BroadcastTrace(int(source), dist, parent, "coupled", int(g.n - 1), log)


def sync_push(g, source: int, seed=None, record: bool = False) -> BroadcastTrace:
    """Synchronous push: in each round every vertex informed at the start of
    the round sends to one uniformly chosen neighbour. Times are round numbers.

    ``g`` may be a :class:`Multigraph` or an implicit :class:`CompleteGraph`.
    """
    n = g.n
    source = int(source)
    if not 0 <= source < n:
        raise IndexError(f"source {source} out of range")
    _require_connected(g)
    rng = np.random.default_rng(seed)
    informed = np.zeros(n, dtype=bool)
    informed[source] = True
    inform_time = np.full(n, -1, dtype=np.int64)
    inform_time[source] = 0
    parent = np.full(n, -1, dtype=np.int64)
    count = 1
    rounds = 0
    events = 0
    logs = []
    while count < n:
        rounds += 1
        senders = np.flatnonzero(informed)
        targets = g.sample_neighbors(senders, rng.random(senders.size))
        events += senders.size
        fresh = ~informed[targets]
        newly, first = np.unique(targets[fresh], return_index=True)
        informed[newly] = True
        inform_time[newly] = rounds
        parent[newly] = senders[fresh][first]
        count += newly.size
        if record:
            part = np.empty(senders.size, dtype=LOG_DTYPE)
            part["time"] = rounds
            part["from"] = senders
            part["to"] = targets
            new = np.zeros(senders.size, dtype=np.int8)
            new[np.flatnonzero(fresh)[first]] = 1
            part["new"] = new
            logs.append(part)
    log = (np.concatenate(logs) if logs else np.empty(0, dtype=LOG_DTYPE)) if record else None
    return BroadcastTrace(source, inform_time, parent, "sync", events, log)
