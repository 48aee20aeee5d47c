"""Continuous-time exploration of a weighted configuration model.

The ball around a source grows while the matching is revealed lazily: after
an Exp(|L|) wait a uniform live half-edge in ``L`` is matched to a uniform
half-edge outside ``L``, the new vertex joins the ball, and each of its other
half-edges closes a cycle against ``L`` with probability
``|L| / (unmatched - 1)`` or joins ``L``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from fpplab.degrees import DegreeDistribution, DegreeSequence, size_biased
from fpplab.errors import DegenerateDistributionError
from fpplab.fpp import WeightedGraph
from fpplab.graph import Multigraph, _as_degrees


class _Draws:
    """Buffered uniforms on [0, 1) from a numpy generator."""

    def __init__(self, rng: np.random.Generator, block: int = 4096):
        self._rng = rng
        self._block = block
        self._buf: list[float] = []
        self._i = 0

    def uniform(self) -> float:
        if self._i >= len(self._buf):
            self._buf = self._rng.random(self._block).tolist()
            self._i = 0
        u = self._buf[self._i]
        self._i += 1
        return u

    def index(self, size: int) -> int:
        k = int(self.uniform() * size)
        return k if k < size else size - 1

    def exponential(self, rate: float) -> float:
        return -math.log1p(-self.uniform()) / rate


@dataclass(frozen=True, eq=False)
class ExplorationTrace:
    """Per-step record of one exploration.

    Step ``i`` (1-based, stored at index ``i-1``) adds ``vertices[i-1]`` at
    time ``tau[i-1]``. ``S`` is the live-list size after the step and ``X`` the
    tree excess of the explored ball; ``S0``/``X0`` describe the ball ``{a}``
    after its own self-loops are revealed. ``i_star`` is the first step with
    an empty list (0 if the source alone exhausts it), or None.
    """

    source: int
    d_a: int
    S0: int
    X0: int
    tau: np.ndarray
    dhat: np.ndarray
    Shat: np.ndarray
    S: np.ndarray
    X: np.ndarray
    vertices: np.ndarray
    i_star: int | None
    edges: np.ndarray
    edge_step: np.ndarray

    @property
    def steps(self) -> int:
        return int(self.tau.size)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "tau", "dhat", "Shat", "S", "X"])
        for i in range(self.steps):
            w.writerow([i + 1, f"{self.tau[i]:.17g}", int(self.dhat[i]), int(self.Shat[i]),
                        int(self.S[i]), int(self.X[i])])
        return buf.getvalue()


def _finish_trace(source, d_a, S0, X0, rows, i_star, edges, edge_step) -> ExplorationTrace:
    tau, dhat, S, X, verts = (np.array(c) for c in zip(*rows)) if rows else ([],) * 5
    tau = np.asarray(tau, dtype=np.float64)
    dhat = np.asarray(dhat, dtype=np.int64)
    steps = np.arange(1, dhat.size + 1)
    Shat = d_a + np.cumsum(dhat) - steps
    return ExplorationTrace(
        source=int(source), d_a=int(d_a), S0=int(S0), X0=int(X0),
        tau=tau, dhat=dhat, Shat=Shat.astype(np.int64),
        S=np.asarray(S, dtype=np.int64), X=np.asarray(X, dtype=np.int64),
        vertices=np.asarray(verts, dtype=np.int64), i_star=i_star,
        edges=np.array(edges, dtype=np.int64).reshape(-1, 2),
        edge_step=np.array(edge_step, dtype=np.int64),
    )


class _LazyMatching:
    """Shared state of a configuration model whose matching is revealed on demand."""

    def __init__(self, degrees: np.ndarray, draws: _Draws):
        self.deg = degrees
        self.n = degrees.size
        self.m = int(degrees.sum())
        self.offset = np.concatenate([[0], np.cumsum(degrees)]).tolist()
        self.owner = np.repeat(np.arange(self.n), degrees).tolist()
        # unmatched half-edges of vertices not yet explored
        self.pool = list(range(self.m))
        self.pool_pos = list(range(self.m))
        self.explored = [False] * self.n
        self.matched = 0
        self.edges: list[tuple[int, int]] = []
        self.draws = draws

    def _claim(self, v: int) -> None:
        self.explored[v] = True
        pool, pos = self.pool, self.pool_pos
        for h in range(self.offset[v], self.offset[v + 1]):
            i = pos[h]
            last = pool[-1]
            pool[i] = last
            pos[last] = i
            pool.pop()

    def _resolve(self, h: int, live: list[int], edge_step: list[int], step: int) -> bool:
        """Close ``h`` against the live list or append it; True if a cycle closed."""
        unmatched = self.m - self.matched
        if live and self.draws.uniform() * (unmatched - 1) < len(live):
            j = self.draws.index(len(live))
            partner = live[j]
            live[j] = live[-1]
            live.pop()
            self.matched += 2
            self.edges.append((self.owner[h], self.owner[partner]))
            edge_step.append(step)
            return True
        live.append(h)
        return False

    def explore(self, a: int, max_steps: int) -> ExplorationTrace:
        if self.explored[a]:
            raise ValueError(f"vertex {a} already explored")
        draws = self.draws
        first_edge = len(self.edges)
        edge_step: list[int] = []
        self._claim(a)
        live: list[int] = []
        excess = 0
        for h in range(self.offset[a], self.offset[a + 1]):
            excess += self._resolve(h, live, edge_step, 0)
        S0, X0 = len(live), excess
        rows = []
        i_star = 0 if not live else None
        t = 0.0
        step = 0
        while live and step < max_steps:
            step += 1
            t += draws.exponential(len(live))
            j = draws.index(len(live))
            hi = live[j]
            live[j] = live[-1]
            live.pop()
            if not self.pool:
                # nothing left outside the list: the rest of the list pairs up
                # among itself; no vertex is added, so this is not a step
                step -= 1
                live.append(hi)
                while live:
                    h1 = live.pop(draws.index(len(live)))
                    h2 = live.pop(draws.index(len(live)))
                    self.matched += 2
                    self.edges.append((self.owner[h1], self.owner[h2]))
                    edge_step.append(step)
                    excess += 1
                if rows:
                    rows[-1] = rows[-1][:2] + (0, excess, rows[-1][4])
                else:
                    S0, X0 = 0, excess
                i_star = step
                break
            h = self.pool[draws.index(len(self.pool))]
            v = self.owner[h]
            self._claim(v)
            self.matched += 2
            self.edges.append((self.owner[hi], v))
            edge_step.append(step)
            for s in range(self.offset[v], self.offset[v + 1]):
                if s != h:
                    excess += self._resolve(s, live, edge_step, step)
            rows.append((t, int(self.deg[v]) - 1, len(live), excess, v))
            if not live:
                i_star = step
        return _finish_trace(a, self.deg[a], S0, X0, rows, i_star,
                             self.edges[first_edge:], edge_step)


def explore(seq, source: int, max_steps: int, seed=None) -> ExplorationTrace:
    """Explore the configuration model with degrees ``seq`` from ``source``.

    Runs until the live list empties or ``max_steps`` vertices have been added.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    d = _as_degrees(seq)
    if not 0 <= source < d.size:
        raise IndexError(f"source {source} out of range")
    state = _LazyMatching(d, _Draws(np.random.default_rng(seed)))
    return state.explore(int(source), max_steps)


def build_by_exploration(seq, seed=None) -> tuple[Multigraph, list[ExplorationTrace]]:
    """Complete a whole multigraph by exploring one component after another."""
    d = _as_degrees(seq)
    rng = np.random.default_rng(seed)
    state = _LazyMatching(d, _Draws(rng))
    traces = []
    for a in range(d.size):
        if not state.explored[a]:
            traces.append(state.explore(a, d.size))
    return Multigraph(int(d.size), np.array(state.edges, dtype=np.int64).reshape(-1, 2)), traces


def explore_graph(g: Multigraph, source: int, max_steps: int | None = None,
                  seed=None) -> tuple[ExplorationTrace, WeightedGraph]:
    """Explore an already-paired multigraph, drawing edge weights lazily.

    Each live half-edge fires at rate 1; the weight of a fired edge is the time
    it waited. Edges that close a cycle get the elapsed time plus a fresh
    Exp(1) residual, and never-touched edges a fresh Exp(1). The returned
    weights are i.i.d. Exp(1) and the trace's ``tau`` are exactly the sorted
    Dijkstra distances from ``source`` under them.
    """
    n = g.n
    if not 0 <= source < n:
        raise IndexError(f"source {source} out of range")
    if max_steps is None:
        max_steps = n
    draws = _Draws(np.random.default_rng(seed))
    indptr, nbr, eid = (a.tolist() for a in g.csr)
    twin = [0] * len(nbr)
    seen: dict[int, int] = {}
    for k, e in enumerate(eid):
        if e in seen:
            twin[k], twin[seen[e]] = seen[e], k
        else:
            seen[e] = k
    weights = [math.nan] * g.num_edges
    joined = [math.nan] * n
    in_ball = [False] * n
    live: list[int] = []
    live_pos = [-1] * len(nbr)
    edges: list[tuple[int, int]] = []
    edge_step: list[int] = []

    def add_live(k):
        live_pos[k] = len(live)
        live.append(k)

    def drop_live(i):
        k = live[i]
        last = live[-1]
        live[i] = last
        live_pos[last] = i
        live.pop()
        live_pos[k] = -1
        return k

    def admit(v, t, step):
        in_ball[v] = True
        joined[v] = t
        closed = 0
        for k in range(indptr[v], indptr[v + 1]):
            e = eid[k]
            if weights[e] == weights[e]:  # already revealed
                continue
            u = nbr[k]
            if u == v:
                if twin[k] > k:
                    weights[e] = draws.exponential(1.0)
                    edges.append((v, v))
                    edge_step.append(step)
                    closed += 1
            elif in_ball[u]:
                drop_live(live_pos[twin[k]])
                weights[e] = (t - joined[u]) + draws.exponential(1.0)
                edges.append((u, v))
                edge_step.append(step)
                closed += 1
            else:
                add_live(k)
        return closed

    excess = admit(source, 0.0, 0)
    S0, X0 = len(live), excess
    rows = []
    i_star = 0 if not live else None
    t = 0.0
    step = 0
    while live and step < max_steps:
        step += 1
        t += draws.exponential(len(live))
        k = drop_live(draws.index(len(live)))
        v = nbr[k]
        owner_k = nbr[twin[k]]
        weights[eid[k]] = t - joined[owner_k]
        edges.append((owner_k, v))
        edge_step.append(step)
        excess += admit(v, t, step)
        rows.append((t, indptr[v + 1] - indptr[v] - 1, len(live), excess, v))
        if not live:
            i_star = step
    for k in live:  # still pending: survived until now, residual is memoryless
        e = eid[k]
        weights[e] = (t - joined[nbr[twin[k]]]) + draws.exponential(1.0)
    for e, w in enumerate(weights):
        if w != w:
            weights[e] = draws.exponential(1.0)
    trace = _finish_trace(source, indptr[source + 1] - indptr[source], S0, X0, rows,
                          i_star, edges, edge_step)
    return trace, WeightedGraph(g, np.array(weights), 1.0)


def hitting_time(trace: ExplorationTrace, k: int) -> float:
    """T_a(k) = tau_{k-1}, with tau_0 = 0."""
    if k < 1 or k > trace.steps + 1:
        raise ValueError(f"k={k} outside explored range 1..{trace.steps + 1}")
    return 0.0 if k == 1 else float(trace.tau[k - 2])


@dataclass(frozen=True)
class GrowthConstants:
    alpha: float
    beta: float
    n: int

    def coupling_ratio(self, delta_max: int) -> float:
        """beta * Delta / n; should be small for the sequence at hand."""
        return self.beta * delta_max / self.n


def growth_constants(n: int, p: DegreeDistribution) -> GrowthConstants:
    if n < 2:
        raise ValueError("need n >= 2")
    nu = size_biased(p).nu
    if not nu > 1:
        raise DegenerateDistributionError(f"nu = {nu} <= 1")
    log_n = math.log(n)
    return GrowthConstants(
        alpha=log_n ** 3,
        beta=3.0 * math.sqrt(p.lam / (nu - 1.0) * n * log_n),
        n=int(n),
    )


def live_sizes(trace: ExplorationTrace, horizon: int) -> np.ndarray:
    """S_1..S_horizon, zero after the list empties."""
    out = np.zeros(horizon, dtype=np.int64)
    k = min(horizon, trace.steps)
    out[:k] = trace.S[:k]
    if trace.i_star is None and trace.steps < horizon:
        raise ValueError(f"trace stopped at step {trace.steps} < horizon {horizon}")
    return out


def event_frequencies(traces, d_min: int, horizon: int) -> tuple[float, float]:
    """Fractions of traces with S_k >= d_min + (d_min-2)k, resp. >= 1 + (d_min-2)k,
    for every 1 <= k <= horizon.
    """
    if not traces:
        return math.nan, math.nan
    k = np.arange(1, horizon + 1)
    strong = d_min + (d_min - 2) * k
    weak = 1 + (d_min - 2) * k
    hits_r = hits_rp = 0
    for tr in traces:
        S = live_sizes(tr, horizon)
        hits_r += bool((S >= strong).all())
        hits_rp += bool((S >= weak).all())
    return hits_r / len(traces), hits_rp / len(traces)


def write_traces_csv(traces, path) -> None:
    with open(path, "w", newline="") as f:
        for i, tr in enumerate(traces):
            text = tr.to_csv()
            f.write(text if i == 0 else text.split("\n", 1)[1])
