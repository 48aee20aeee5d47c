"""Configuration-model multigraphs: half-edge pairing, simplicity, connectivity."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from fpplab import kernels
from fpplab.degrees import DegreeSequence
from fpplab.errors import ParityError, RejectionError

DEFAULT_MAX_ATTEMPTS = 1000


@dataclass(frozen=True, eq=False)
class Multigraph:
    """Undirected multigraph on vertices ``0..n-1``.

    ``edges`` is an ``(E, 2)`` array; a row ``(u, u)`` is a self-loop and
    contributes 2 to the degree of ``u``. Repeated rows are parallel edges.
    """

    n: int
    edges: np.ndarray

    def __post_init__(self):
        e = np.array(self.edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= self.n):
            raise ValueError("edge endpoint out of range")
        e.setflags(write=False)
        object.__setattr__(self, "edges", e)

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    @cached_property
    def degrees(self) -> np.ndarray:
        d = np.bincount(self.edges.ravel(), minlength=self.n).astype(np.int64)
        d.setflags(write=False)
        return d

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Half-edge adjacency ``(indptr, nbr, eid)``.

        Slot ``k`` in ``indptr[u]:indptr[u+1]`` is a half-edge of ``u`` whose
        edge is ``eid[k]`` and whose other end is ``nbr[k]``. A self-loop owns
        two slots at its vertex, so ``indptr`` differences equal degrees and a
        uniform slot is a uniform half-edge.
        """
        e = self.edges
        m = e.shape[0]
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        eid = np.concatenate([np.arange(m), np.arange(m)])
        order = np.lexsort((eid, src))
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=self.n), out=indptr[1:])
        out = (indptr, np.ascontiguousarray(dst[order]), np.ascontiguousarray(eid[order]))
        for a in out:
            a.setflags(write=False)
        return out

    def is_regular(self) -> bool:
        return self.n > 0 and bool((self.degrees == self.degrees[0]).all())

    def sample_neighbors(self, nodes: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Other end of a uniformly chosen half-edge of each vertex in ``nodes``.

        ``u`` holds one uniform draw on [0, 1) per vertex.
        """
        indptr, nbr, _ = self.csr
        start = indptr[nodes]
        deg = indptr[nodes + 1] - start
        k = np.minimum((u * deg).astype(np.int64), deg - 1)
        return nbr[start + k]


@dataclass(frozen=True)
class CompleteGraph:
    """Implicit complete graph K_n; used where a dense adjacency would not fit."""

    n: int

    def sample_neighbors(self, nodes: np.ndarray, u: np.ndarray) -> np.ndarray:
        v = np.minimum((u * (self.n - 1)).astype(np.int64), self.n - 2)
        return v + (v >= nodes)


def _as_degrees(seq) -> np.ndarray:
    if isinstance(seq, DegreeSequence):
        return np.asarray(seq.degrees)
    d = np.asarray(seq, dtype=np.int64)
    if int(d.sum()) % 2:
        raise ParityError(f"total degree {int(d.sum())} is odd")
    return d


def pair_half_edges(seq, seed=None) -> Multigraph:
    """Uniform perfect matching of half-edges: shuffle the stub list, pair neighbours."""
    d = _as_degrees(seq)
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(d.size, dtype=np.int64), d)
    rng.shuffle(stubs)
    return Multigraph(int(d.size), stubs.reshape(-1, 2))


def self_loop_count(g: Multigraph) -> int:
    return int(np.count_nonzero(g.edges[:, 0] == g.edges[:, 1]))


def is_simple(g: Multigraph) -> bool:
    e = g.edges
    if e.shape[0] == 0:
        return True
    if np.any(e[:, 0] == e[:, 1]):
        return False
    key = np.minimum(e[:, 0], e[:, 1]) * g.n + np.maximum(e[:, 0], e[:, 1])
    key.sort()
    return not np.any(key[1:] == key[:-1])


def sample_simple(seq, seed=None, max_attempts: int = DEFAULT_MAX_ATTEMPTS) -> tuple[Multigraph, int]:
    """Redraw whole matchings until one is simple; returns ``(graph, attempts)``.

    Rejection keeps the output uniform over simple graphs with the given degrees.
    """
    if max_attempts < 1:
        raise ValueError("max_attempts must be >= 1")
    d = _as_degrees(seq)
    rng = np.random.default_rng(seed)
    for attempt in range(1, max_attempts + 1):
        g = pair_half_edges(d, rng)
        if is_simple(g):
            return g, attempt
    raise RejectionError(max_attempts)


def component_labels(g: Multigraph) -> tuple[np.ndarray, int]:
    indptr, nbr, _ = g.csr
    return kernels.component_labels(indptr, nbr)


def connected_components(g: Multigraph) -> list[np.ndarray]:
    labels, count = component_labels(g)
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(count + 1))
    return [order[bounds[i]:bounds[i + 1]] for i in range(count)]


def is_connected(g: Multigraph) -> bool:
    return g.n <= 1 or component_labels(g)[1] == 1


# -- edge-list text format: header "n m", then "u v" (or "u v w") per line --

def format_edge_list(g: Multigraph, weights: np.ndarray | None = None) -> str:
    lines = [f"{g.n} {g.num_edges}"]
    if weights is None:
        lines.extend(f"{u} {v}" for u, v in g.edges.tolist())
    else:
        lines.extend(f"{u} {v} {w:.17g}" for (u, v), w in zip(g.edges.tolist(), weights.tolist()))
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> tuple[Multigraph, np.ndarray | None]:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise ValueError("empty edge list")
    n, m = int(rows[0][0]), int(rows[0][1])
    body = rows[1:]
    if len(body) != m:
        raise ValueError(f"header says {m} edges, found {len(body)}")
    widths = {len(r) for r in body}
    if len(widths) > 1:
        raise ValueError("mixed weighted and unweighted rows")
    edges = np.array([[int(r[0]), int(r[1])] for r in body], dtype=np.int64).reshape(-1, 2)
    weights = None
    if widths == {3}:
        weights = np.array([float(r[2]) for r in body], dtype=np.float64)
    return Multigraph(n, edges), weights


def write_edge_list(path: str | Path, g: Multigraph, weights: np.ndarray | None = None) -> None:
    Path(path).write_text(format_edge_list(g, weights))


def read_edge_list(path: str | Path) -> tuple[Multigraph, np.ndarray | None]:
    return parse_edge_list(Path(path).read_text())
