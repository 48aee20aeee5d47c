"""Pure-Python graph kernels.

Reference implementations of everything in ``_ckernels``. Same signatures,
same draw order, same tie-breaking; slower by one to two orders of magnitude.
"""
import heapq
from collections import deque
from math import inf

import numpy as np


def dijkstra(indptr, nbr, slot_w, source):
    n = len(indptr) - 1
    indptr = indptr.tolist()
    nbr = nbr.tolist()
    slot_w = slot_w.tolist()
    dist = [inf] * n
    done = [False] * n
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        du, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for k in range(indptr[u], indptr[u + 1]):
            v = nbr[k]
            if done[v]:
                continue
            alt = du + slot_w[k]
            if alt < dist[v]:
                dist[v] = alt
                heapq.heappush(heap, (alt, v))
    return np.array(dist, dtype=np.float64)


def weighted_eccentricities(indptr, nbr, slot_w, sources):
    out = np.empty(len(sources), dtype=np.float64)
    for j, s in enumerate(sources):
        out[j] = dijkstra(indptr, nbr, slot_w, int(s)).max()
    return out


def _bfs(indptr, nbr, source, n):
    dist = [-1] * n
    dist[source] = 0
    queue = deque([source])
    last = source
    while queue:
        u = queue.popleft()
        last = u
        du = dist[u] + 1
        for k in range(indptr[u], indptr[u + 1]):
            v = nbr[k]
            if dist[v] < 0:
                dist[v] = du
                queue.append(v)
    return dist, last


def bfs(indptr, nbr, source):
    n = len(indptr) - 1
    dist, _ = _bfs(indptr.tolist(), nbr.tolist(), int(source), n)
    return np.array(dist, dtype=np.int64)


def hop_eccentricities(indptr, nbr, sources):
    n = len(indptr) - 1
    indptr = indptr.tolist()
    nbr = nbr.tolist()
    out = np.empty(len(sources), dtype=np.int64)
    for j, s in enumerate(sources):
        dist, last = _bfs(indptr, nbr, int(s), n)
        out[j] = -1 if min(dist) < 0 else dist[last]
    return out


def component_labels(indptr, nbr):
    n = len(indptr) - 1
    indptr = indptr.tolist()
    nbr = nbr.tolist()
    labels = [-1] * n
    count = 0
    for s in range(n):
        if labels[s] >= 0:
            continue
        labels[s] = count
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for k in range(indptr[u], indptr[u + 1]):
                v = nbr[k]
                if labels[v] < 0:
                    labels[v] = count
                    queue.append(v)
        count += 1
    return np.array(labels, dtype=np.int64), count


def async_push(indptr, nbr, source, first_tick, draw, chunk, record):
    n = len(indptr) - 1
    indptr = indptr.tolist()
    nbr = nbr.tolist()
    inform = [inf] * n
    parent = [-1] * n
    inform[source] = 0.0
    heap = [(first_tick, source)]
    informed = 1
    events = 0
    log_t, log_f, log_to, log_new = [], [], [], []
    while informed < n:
        U, E = draw(chunk)
        U = U.tolist()
        E = E.tolist()
        lt, lf, lto, lnew = [], [], [], []
        iu = ie = 0
        nu = len(U)
        while informed < n and iu < nu:
            t, u = heap[0]
            d = indptr[u + 1] - indptr[u]
            k = int(U[iu] * d)
            if k >= d:
                k = d - 1
            v = nbr[indptr[u] + k]
            new = inform[v] == inf
            if record:
                lt.append(t)
                lf.append(u)
                lto.append(v)
                lnew.append(new)
            iu += 1
            heapq.heapreplace(heap, (t + E[ie], u))
            ie += 1
            if new:
                inform[v] = t
                parent[v] = u
                informed += 1
                heapq.heappush(heap, (t + E[ie], v))
                ie += 1
        events += iu
        if record:
            log_t.append(np.array(lt, dtype=np.float64))
            log_f.append(np.array(lf, dtype=np.int64))
            log_to.append(np.array(lto, dtype=np.int64))
            log_new.append(np.array(lnew, dtype=np.int8))
    log = (log_t, log_f, log_to, log_new) if record else None
    return (np.array(inform, dtype=np.float64), np.array(parent, dtype=np.int64),
            events, log)
