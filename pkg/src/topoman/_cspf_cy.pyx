# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled constrained shortest-path kernel.

Same search and tie-break rules as _cspf_py (latency, then hops, then
lexicographic link-index sequence); labels live in growable C arrays and
carry parent pointers instead of copied sequences, with the lexicographic
comparison done by materializing both candidate sequences only when
latency and hop count tie.
"""

from libc.stdlib cimport free, malloc, realloc


cdef struct _Labels:
    double *lat
    int *hops
    long *parent
    int *link
    int *node
    long count
    long cap


cdef int _grow_labels(_Labels *lb) except -1:
    cdef long newcap = lb.cap * 2
    lb.lat = <double *> realloc(lb.lat, newcap * sizeof(double))
    lb.hops = <int *> realloc(lb.hops, newcap * sizeof(int))
    lb.parent = <long *> realloc(lb.parent, newcap * sizeof(long))
    lb.link = <int *> realloc(lb.link, newcap * sizeof(int))
    lb.node = <int *> realloc(lb.node, newcap * sizeof(int))
    if lb.lat == NULL or lb.hops == NULL or lb.parent == NULL or lb.link == NULL or lb.node == NULL:
        raise MemoryError()
    lb.cap = newcap
    return 0


cdef void _fill_sequence(_Labels *lb, long idx, int *out):
    # link indices from source to the label, written front to back
    cdef long cur = idx
    cdef int pos = lb.hops[idx]
    while cur >= 0 and lb.hops[cur] > 0:
        pos -= 1
        out[pos] = lb.link[cur]
        cur = lb.parent[cur]


cdef bint _label_less(_Labels *lb, long a, long b, int *scratch_a, int *scratch_b):
    if lb.lat[a] != lb.lat[b]:
        return lb.lat[a] < lb.lat[b]
    if lb.hops[a] != lb.hops[b]:
        return lb.hops[a] < lb.hops[b]
    _fill_sequence(lb, a, scratch_a)
    _fill_sequence(lb, b, scratch_b)
    cdef int i
    for i in range(lb.hops[a]):
        if scratch_a[i] != scratch_b[i]:
            return scratch_a[i] < scratch_b[i]
    return False


cdef void _heap_push(long *heap, long *size, _Labels *lb, long item,
                     int *scratch_a, int *scratch_b):
    cdef long pos = size[0]
    cdef long up
    heap[pos] = item
    size[0] += 1
    while pos > 0:
        up = (pos - 1) >> 1
        if _label_less(lb, heap[pos], heap[up], scratch_a, scratch_b):
            heap[pos], heap[up] = heap[up], heap[pos]
            pos = up
        else:
            break


cdef long _heap_pop(long *heap, long *size, _Labels *lb,
                    int *scratch_a, int *scratch_b):
    cdef long top = heap[0]
    cdef long pos = 0
    cdef long child
    size[0] -= 1
    heap[0] = heap[size[0]]
    while True:
        child = 2 * pos + 1
        if child >= size[0]:
            break
        if child + 1 < size[0] and _label_less(lb, heap[child + 1], heap[child], scratch_a, scratch_b):
            child += 1
        if _label_less(lb, heap[child], heap[pos], scratch_a, scratch_b):
            heap[pos], heap[child] = heap[child], heap[pos]
            pos = child
        else:
            break
    return top


def shortest_feasible_path(
    int n_nodes,
    int[:] adj_offsets,
    int[:] adj_nodes,
    int[:] adj_links,
    double[:] latency,
    double[:] residual,
    int src,
    int dst,
    double min_bw,
    double max_latency,
    int max_hops,
):
    """Best feasible path from src to dst as a list of link indices.

    max_latency is +inf when unconstrained; max_hops is -1 when
    unconstrained. Returns None when no feasible path exists.
    """
    if src == dst:
        return []
    cdef bint bounded = max_hops >= 0
    cdef int hop_cap = n_nodes - 1
    if bounded and max_hops < hop_cap:
        hop_cap = max_hops
    if hop_cap <= 0:
        return None

    cdef long n_states = n_nodes * (<long> hop_cap + 1) if bounded else n_nodes
    cdef char *settled = <char *> malloc(n_states * sizeof(char))
    cdef int *scratch_a = <int *> malloc(n_nodes * sizeof(int))
    cdef int *scratch_b = <int *> malloc(n_nodes * sizeof(int))
    cdef _Labels lb
    lb.cap = 1024
    lb.count = 0
    lb.lat = <double *> malloc(lb.cap * sizeof(double))
    lb.hops = <int *> malloc(lb.cap * sizeof(int))
    lb.parent = <long *> malloc(lb.cap * sizeof(long))
    lb.link = <int *> malloc(lb.cap * sizeof(int))
    lb.node = <int *> malloc(lb.cap * sizeof(int))
    cdef long heap_cap = 1024
    cdef long heap_size = 0
    cdef long *heap = <long *> malloc(heap_cap * sizeof(long))
    if (settled == NULL or scratch_a == NULL or scratch_b == NULL or heap == NULL
            or lb.lat == NULL or lb.hops == NULL or lb.parent == NULL
            or lb.link == NULL or lb.node == NULL):
        free(settled); free(scratch_a); free(scratch_b); free(heap)
        free(lb.lat); free(lb.hops); free(lb.parent); free(lb.link); free(lb.node)
        raise MemoryError()

    cdef long i
    for i in range(n_states):
        settled[i] = 0

    cdef long cur, state_key, nkey
    cdef int node, hops, nhops, li, nxt, a
    cdef double lat, nlat
    result = None
    try:
        lb.lat[0] = 0.0
        lb.hops[0] = 0
        lb.parent[0] = -1
        lb.link[0] = -1
        lb.node[0] = src
        lb.count = 1
        _heap_push(heap, &heap_size, &lb, 0, scratch_a, scratch_b)
        while heap_size > 0:
            cur = _heap_pop(heap, &heap_size, &lb, scratch_a, scratch_b)
            node = lb.node[cur]
            hops = lb.hops[cur]
            state_key = node * (<long> hop_cap + 1) + hops if bounded else node
            if settled[state_key]:
                continue
            settled[state_key] = 1
            if node == dst:
                out = [0] * hops
                _fill_sequence(&lb, cur, scratch_a)
                for a in range(hops):
                    out[a] = scratch_a[a]
                result = out
                break
            if hops == hop_cap:
                continue
            lat = lb.lat[cur]
            nhops = hops + 1
            for a in range(adj_offsets[node], adj_offsets[node + 1]):
                li = adj_links[a]
                if residual[li] < min_bw:
                    continue
                nlat = lat + latency[li]
                if nlat > max_latency:
                    continue
                nxt = adj_nodes[a]
                nkey = nxt * (<long> hop_cap + 1) + nhops if bounded else nxt
                if settled[nkey]:
                    continue
                if lb.count == lb.cap:
                    _grow_labels(&lb)
                lb.lat[lb.count] = nlat
                lb.hops[lb.count] = nhops
                lb.parent[lb.count] = cur
                lb.link[lb.count] = li
                lb.node[lb.count] = nxt
                lb.count += 1
                if heap_size == heap_cap:
                    heap_cap *= 2
                    heap = <long *> realloc(heap, heap_cap * sizeof(long))
                    if heap == NULL:
                        raise MemoryError()
                _heap_push(heap, &heap_size, &lb, lb.count - 1, scratch_a, scratch_b)
    finally:
        free(settled)
        free(scratch_a)
        free(scratch_b)
        free(heap)
        free(lb.lat)
        free(lb.hops)
        free(lb.parent)
        free(lb.link)
        free(lb.node)
    return result
