# cython: language_level=3
"""Compiled graph kernels.

Every function here has a line-for-line counterpart in ``_pykernels`` and
must consume random draws in the same order, so both backends return
identical results for identical inputs.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY
from libc.stdlib cimport free, malloc

cnp.import_array()

ctypedef cnp.int64_t i64


# --------------------------------------------------------------------------
# lazy binary heap of (key, vertex) entries, ordered lexicographically

cdef struct Entry:
    double key
    i64 v


cdef inline bint _eless(Entry a, Entry b) noexcept nogil:
    return a.key < b.key or (a.key == b.key and a.v < b.v)


cdef inline void _epush(Entry* heap, i64* size, double key, i64 v) noexcept nogil:
    cdef i64 i = size[0]
    cdef i64 p
    cdef Entry e
    e.key = key
    e.v = v
    size[0] += 1
    while i > 0:
        p = (i - 1) >> 1
        if _eless(e, heap[p]):
            heap[i] = heap[p]
            i = p
        else:
            break
    heap[i] = e


cdef inline Entry _epop(Entry* heap, i64* size) noexcept nogil:
    cdef Entry top = heap[0]
    cdef i64 n = size[0] - 1
    cdef Entry last = heap[n]
    cdef i64 i = 0
    cdef i64 c
    size[0] = n
    while True:
        c = 2 * i + 1
        if c >= n:
            break
        if c + 1 < n and _eless(heap[c + 1], heap[c]):
            c += 1
        if _eless(heap[c], last):
            heap[i] = heap[c]
            i = c
        else:
            break
    heap[i] = last
    return top


cdef void _dijkstra(const i64[:] indptr, const i64[:] nbr, const double[:] slot_w,
                    i64 source, double[:] dist, Entry* heap, char* done) noexcept nogil:
    cdef i64 n = dist.shape[0]
    cdef i64 size = 0
    cdef i64 u, v, k
    cdef double du, alt
    cdef Entry top
    for u in range(n):
        dist[u] = INFINITY
        done[u] = 0
    dist[source] = 0.0
    _epush(heap, &size, 0.0, source)
    while size > 0:
        top = _epop(heap, &size)
        u = top.v
        if done[u]:
            continue
        done[u] = 1
        du = top.key
        for k in range(indptr[u], indptr[u + 1]):
            v = nbr[k]
            if done[v]:
                continue
            alt = du + slot_w[k]
            if alt < dist[v]:
                dist[v] = alt
                _epush(heap, &size, alt, v)


cdef Entry* _heap_alloc(i64 slots):
    # a lazy heap holds at most one entry per successful relaxation, plus the source
    return <Entry*> malloc((slots + 1) * sizeof(Entry))


def dijkstra(const i64[:] indptr, const i64[:] nbr, const double[:] slot_w, i64 source):
    cdef i64 n = indptr.shape[0] - 1
    dist_arr = np.empty(n, dtype=np.float64)
    cdef double[:] dist = dist_arr
    cdef Entry* heap = _heap_alloc(nbr.shape[0])
    cdef char* done = <char*> malloc(max(n, 1))
    if heap == NULL or done == NULL:
        free(heap)
        free(done)
        raise MemoryError()
    with nogil:
        _dijkstra(indptr, nbr, slot_w, source, dist, heap, done)
    free(heap)
    free(done)
    return dist_arr


def weighted_eccentricities(const i64[:] indptr, const i64[:] nbr, const double[:] slot_w,
                            const i64[:] sources):
    """Max finite-or-infinite distance from each source (inf if anything is unreachable)."""
    cdef i64 n = indptr.shape[0] - 1
    cdef i64 m = sources.shape[0]
    ecc_arr = np.empty(m, dtype=np.float64)
    cdef double[:] ecc = ecc_arr
    cdef double[:] dist = np.empty(n, dtype=np.float64)
    cdef Entry* heap = _heap_alloc(nbr.shape[0])
    cdef char* done = <char*> malloc(max(n, 1))
    cdef i64 j, v
    cdef double best
    if heap == NULL or done == NULL:
        free(heap)
        free(done)
        raise MemoryError()
    with nogil:
        for j in range(m):
            _dijkstra(indptr, nbr, slot_w, sources[j], dist, heap, done)
            best = 0.0
            for v in range(n):
                if dist[v] > best:
                    best = dist[v]
            ecc[j] = best
    free(heap)
    free(done)
    return ecc_arr


# --------------------------------------------------------------------------
# breadth-first search

cdef i64 _bfs(const i64[:] indptr, const i64[:] nbr, i64 source, i64[:] dist, i64* queue) noexcept nogil:
    """Fill ``dist`` with hop counts (-1 unreachable); return the number reached."""
    cdef i64 n = dist.shape[0]
    cdef i64 head = 0, tail = 1
    cdef i64 u, v, k
    for u in range(n):
        dist[u] = -1
    dist[source] = 0
    queue[0] = source
    while head < tail:
        u = queue[head]
        head += 1
        for k in range(indptr[u], indptr[u + 1]):
            v = nbr[k]
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue[tail] = v
                tail += 1
    return tail


def bfs(const i64[:] indptr, const i64[:] nbr, i64 source):
    cdef i64 n = indptr.shape[0] - 1
    dist_arr = np.empty(n, dtype=np.int64)
    cdef i64[:] dist = dist_arr
    cdef i64* queue = <i64*> malloc(max(n, 1) * sizeof(i64))
    if queue == NULL:
        raise MemoryError()
    with nogil:
        _bfs(indptr, nbr, source, dist, queue)
    free(queue)
    return dist_arr


def hop_eccentricities(const i64[:] indptr, const i64[:] nbr, const i64[:] sources):
    """Hop eccentricity per source, -1 when the source does not reach every vertex."""
    cdef i64 n = indptr.shape[0] - 1
    cdef i64 m = sources.shape[0]
    ecc_arr = np.empty(m, dtype=np.int64)
    cdef i64[:] ecc = ecc_arr
    cdef i64[:] dist = np.empty(n, dtype=np.int64)
    cdef i64* queue = <i64*> malloc(max(n, 1) * sizeof(i64))
    cdef i64 j, reached
    if queue == NULL:
        raise MemoryError()
    with nogil:
        for j in range(m):
            reached = _bfs(indptr, nbr, sources[j], dist, queue)
            if reached < n:
                ecc[j] = -1
            else:
                # BFS order is nondecreasing in hop count
                ecc[j] = dist[queue[n - 1]]
    free(queue)
    return ecc_arr


def component_labels(const i64[:] indptr, const i64[:] nbr):
    cdef i64 n = indptr.shape[0] - 1
    labels_arr = np.full(n, -1, dtype=np.int64)
    cdef i64[:] labels = labels_arr
    cdef i64* queue = <i64*> malloc(max(n, 1) * sizeof(i64))
    cdef i64 count = 0
    cdef i64 s, u, v, k, head, tail
    if queue == NULL:
        raise MemoryError()
    with nogil:
        for s in range(n):
            if labels[s] >= 0:
                continue
            labels[s] = count
            queue[0] = s
            head = 0
            tail = 1
            while head < tail:
                u = queue[head]
                head += 1
                for k in range(indptr[u], indptr[u + 1]):
                    v = nbr[k]
                    if labels[v] < 0:
                        labels[v] = count
                        queue[tail] = v
                        tail += 1
            count += 1
    free(queue)
    return labels_arr, count


# --------------------------------------------------------------------------
# asynchronous push: rate-1 Poisson clocks on informed vertices only

cdef inline bint _tless(double* ht, i64* hv, i64 a, i64 b) noexcept nogil:
    return ht[a] < ht[b] or (ht[a] == ht[b] and hv[a] < hv[b])


cdef inline void _tswap(double* ht, i64* hv, i64 a, i64 b) noexcept nogil:
    cdef double t = ht[a]
    cdef i64 v = hv[a]
    ht[a] = ht[b]
    hv[a] = hv[b]
    ht[b] = t
    hv[b] = v


cdef inline void _tpush(double* ht, i64* hv, i64* size, double t, i64 v) noexcept nogil:
    cdef i64 i = size[0]
    cdef i64 p
    ht[i] = t
    hv[i] = v
    size[0] += 1
    while i > 0:
        p = (i - 1) >> 1
        if _tless(ht, hv, i, p):
            _tswap(ht, hv, i, p)
            i = p
        else:
            break


cdef inline void _tdown(double* ht, i64* hv, i64 size) noexcept nogil:
    cdef i64 i = 0
    cdef i64 c
    while True:
        c = 2 * i + 1
        if c >= size:
            break
        if c + 1 < size and _tless(ht, hv, c + 1, c):
            c += 1
        if _tless(ht, hv, c, i):
            _tswap(ht, hv, c, i)
            i = c
        else:
            break


def async_push(const i64[:] indptr, const i64[:] nbr, i64 source, double first_tick,
               draw, i64 chunk, bint record):
    """Run the push process to completion.

    ``draw(k)`` must return ``(U, E)``: ``k`` uniforms on [0, 1) and ``2k``
    standard exponentials. Per tick one uniform picks the target half-edge;
    the ticking vertex is rescheduled with the next exponential, and a newly
    informed target is then scheduled with the one after.
    """
    cdef i64 n = indptr.shape[0] - 1
    inform_arr = np.full(n, np.inf, dtype=np.float64)
    parent_arr = np.full(n, -1, dtype=np.int64)
    cdef double[:] inform = inform_arr
    cdef i64[:] parent = parent_arr
    cdef double* ht = <double*> malloc(max(n, 1) * sizeof(double))
    cdef i64* hv = <i64*> malloc(max(n, 1) * sizeof(i64))
    cdef i64 size = 0
    cdef i64 informed = 1
    cdef i64 events = 0
    cdef i64 iu, ie, nu, u, v, d, k
    cdef double t
    cdef const double[:] U
    cdef const double[:] E
    log_t, log_f, log_to, log_new = [], [], [], []
    cdef double[:] lt
    cdef i64[:] lf, lto
    cdef cnp.int8_t[:] lnew
    if ht == NULL or hv == NULL:
        free(ht)
        free(hv)
        raise MemoryError()
    inform[source] = 0.0
    _tpush(ht, hv, &size, first_tick, source)
    try:
        while informed < n:
            U_arr, E_arr = draw(chunk)
            U = U_arr
            E = E_arr
            nu = U.shape[0]
            if record:
                lt_arr = np.empty(nu, dtype=np.float64)
                lf_arr = np.empty(nu, dtype=np.int64)
                lto_arr = np.empty(nu, dtype=np.int64)
                lnew_arr = np.empty(nu, dtype=np.int8)
                lt = lt_arr
                lf = lf_arr
                lto = lto_arr
                lnew = lnew_arr
            iu = 0
            ie = 0
            with nogil:
                while informed < n and iu < nu:
                    t = ht[0]
                    u = hv[0]
                    d = indptr[u + 1] - indptr[u]
                    k = <i64> (U[iu] * d)
                    if k >= d:
                        k = d - 1
                    v = nbr[indptr[u] + k]
                    if record:
                        lt[iu] = t
                        lf[iu] = u
                        lto[iu] = v
                        lnew[iu] = inform[v] == INFINITY
                    iu += 1
                    ht[0] = t + E[ie]
                    ie += 1
                    _tdown(ht, hv, size)
                    if inform[v] == INFINITY:
                        inform[v] = t
                        parent[v] = u
                        informed += 1
                        _tpush(ht, hv, &size, t + E[ie], v)
                        ie += 1
            events += iu
            if record:
                log_t.append(lt_arr[:iu])
                log_f.append(lf_arr[:iu])
                log_to.append(lto_arr[:iu])
                log_new.append(lnew_arr[:iu])
    finally:
        free(ht)
        free(hv)
    log = None
    if record:
        log = (log_t, log_f, log_to, log_new)
    return inform_arr, parent_arr, events, log
