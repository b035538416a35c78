# Compiled hot loops. Must stay behaviourally identical to _pykernels.py;
# tests/test_kernels.py runs both backends against each other.

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int8_t, int32_t, int64_t, uint8_t
from libc.string cimport memset

cnp.import_array()


cdef inline void _census_into(const uint8_t[:, ::1] adj, int n,
                              const int8_t[::1] lut, int64_t[::1] out) noexcept nogil:
    cdef int i, j, k, cij
    for i in range(n):
        for j in range(i + 1, n):
            cij = (adj[i, j] << 5) | (adj[j, i] << 3)
            for k in range(j + 1, n):
                out[lut[cij | (adj[i, k] << 4) | (adj[j, k] << 2)
                        | (adj[k, i] << 1) | adj[k, j]]] += 1


def triad_census(const uint8_t[:, ::1] adj, const int8_t[::1] lut):
    """Counts per class id; index 0 collects disconnected triples."""
    cdef int n = adj.shape[0]
    out = np.zeros(14, dtype=np.int64)
    cdef int64_t[::1] ov = out
    with nogil:
        _census_into(adj, n, lut, ov)
    return out


cdef int _bfs(const int32_t* start, const int32_t* nbr, const int32_t* eid,
              const uint8_t[::1] producer, const uint8_t[::1] demander, int n,
              int skip, int32_t* seen, int32_t* queue, int32_t* parent) noexcept nogil:
    cdef int head = 0, tail = 0, v, w, p, count = 0
    for v in range(n):
        seen[v] = 0
        parent[v] = -1
    for v in range(n):
        if producer[v]:
            seen[v] = 1
            queue[tail] = v
            tail += 1
    while head < tail:
        v = queue[head]
        head += 1
        if demander[v]:
            count += 1
        for p in range(start[v], start[v + 1]):
            if eid[p] == skip:
                continue
            w = nbr[p]
            if not seen[w]:
                seen[w] = 1
                parent[w] = eid[p]
                queue[tail] = w
                tail += 1
    return count


cdef void _csr(const int32_t[:, ::1] edges, int n, int32_t* start, int32_t* nbr,
               int32_t* eid) noexcept nogil:
    # stable counting sort of edges by source
    cdef int m = edges.shape[0], e, u, pos
    for u in range(n + 1):
        start[u] = 0
    for e in range(m):
        start[edges[e, 0] + 1] += 1
    for u in range(n):
        start[u + 1] += start[u]
    for e in range(m):
        u = edges[e, 0]
        # start[u] temporarily advances as the fill cursor
        pos = start[u]
        nbr[pos] = edges[e, 1]
        eid[pos] = e
        start[u] = pos + 1
    for u in range(n, 0, -1):
        start[u] = start[u - 1]
    start[0] = 0


def satisfied_count(const int32_t[:, ::1] edges, int n,
                    const uint8_t[::1] producer, const uint8_t[::1] demander):
    cdef int m = edges.shape[0]
    work = np.empty(4 * n + 1 + 2 * m + 1, dtype=np.int32)
    cdef int32_t[::1] w = work
    cdef int32_t* base = &w[0]
    cdef int count
    with nogil:
        _csr(edges, n, base, base + n + 1, base + n + 1 + m)
        count = _bfs(base, base + n + 1, base + n + 1 + m, producer, demander, n, -1,
                     base + n + 1 + 2 * m, base + 2 * n + 1 + 2 * m, base + 3 * n + 1 + 2 * m)
    return count


def removable_edges(const int32_t[:, ::1] edges, int n,
                    const uint8_t[::1] producer, const uint8_t[::1] demander):
    """Mask of edges whose single removal keeps the satisfied-demander count.

    Only edges of one BFS reachability tree can matter: deleting any other
    edge leaves that tree, and hence the reachable set, intact.
    """
    cdef int m = edges.shape[0], v, e, base
    work = np.empty(5 * n + 1 + 2 * m + 1, dtype=np.int32)
    mask = np.ones(m, dtype=np.uint8)
    cdef uint8_t[::1] mv = mask
    cdef int32_t[::1] w = work
    cdef int32_t* start = &w[0]
    cdef int32_t* nbr = start + n + 1
    cdef int32_t* eid = nbr + m
    cdef int32_t* seen = eid + m
    cdef int32_t* queue = seen + n
    cdef int32_t* parent = queue + n
    cdef int32_t* tree = parent + n
    with nogil:
        _csr(edges, n, start, nbr, eid)
        base = _bfs(start, nbr, eid, producer, demander, n, -1, seen, queue, tree)
        for v in range(n):
            e = tree[v]
            if e >= 0:
                if _bfs(start, nbr, eid, producer, demander, n, e, seen, queue, parent) < base:
                    mv[e] = 0
    return mask, base


cdef void _switch(int32_t[:, ::1] singles, int32_t[:, ::1] pairs, uint8_t[:, ::1] adj,
                  const int32_t[:, ::1] prop_s, const int32_t[:, ::1] prop_p,
                  bint keep_mutual) noexcept nogil:
    cdef int t, i, j, a, b, c, d, tmp
    for t in range(prop_s.shape[0]):
        i = prop_s[t, 0]
        j = prop_s[t, 1]
        if i == j:
            continue
        a = singles[i, 0]; b = singles[i, 1]
        c = singles[j, 0]; d = singles[j, 1]
        if a == d or c == b:
            continue
        if adj[a, d] or adj[c, b]:
            continue
        if keep_mutual and (adj[d, a] or adj[b, c]):
            continue
        adj[a, b] = 0; adj[c, d] = 0
        adj[a, d] = 1; adj[c, b] = 1
        singles[i, 1] = d
        singles[j, 1] = b
    for t in range(prop_p.shape[0]):
        i = prop_p[t, 0]
        j = prop_p[t, 1]
        if i == j:
            continue
        a = pairs[i, 0]; b = pairs[i, 1]
        c = pairs[j, 0]; d = pairs[j, 1]
        if prop_p[t, 2]:
            tmp = c; c = d; d = tmp
        if a == d or c == b:
            continue
        if adj[a, d] or adj[d, a] or adj[c, b] or adj[b, c]:
            continue
        adj[a, b] = 0; adj[b, a] = 0; adj[c, d] = 0; adj[d, c] = 0
        adj[a, d] = 1; adj[d, a] = 1; adj[c, b] = 1; adj[b, c] = 1
        pairs[i, 1] = d
        pairs[j, 0] = c
        pairs[j, 1] = b


cdef void _fill_adj(uint8_t[:, ::1] adj, const int32_t[:, ::1] singles,
                    const int32_t[:, ::1] pairs, int n) noexcept nogil:
    cdef int t
    memset(&adj[0, 0], 0, n * n)
    for t in range(singles.shape[0]):
        adj[singles[t, 0], singles[t, 1]] = 1
    for t in range(pairs.shape[0]):
        adj[pairs[t, 0], pairs[t, 1]] = 1
        adj[pairs[t, 1], pairs[t, 0]] = 1


def switch_randomize(const int32_t[:, ::1] singles, const int32_t[:, ::1] pairs, int n,
                     const int32_t[:, ::1] prop_s, const int32_t[:, ::1] prop_p,
                     bint keep_mutual):
    s = np.array(singles, dtype=np.int32, copy=True).reshape(-1, 2)
    p = np.array(pairs, dtype=np.int32, copy=True).reshape(-1, 2)
    adj = np.empty((max(n, 1), max(n, 1)), dtype=np.uint8)
    _fill_adj(adj, s, p, n)
    _switch(s, p, adj, prop_s, prop_p, keep_mutual)
    return s, p


def ensemble_census(const int32_t[:, ::1] singles, const int32_t[:, ::1] pairs, int n,
                    const int32_t[:, :, ::1] prop_s, const int32_t[:, :, ::1] prop_p,
                    bint keep_mutual, const int8_t[::1] lut):
    """Census of each randomized ensemble member; shape (K, 14)."""
    cdef int k, kk = prop_s.shape[0]
    out = np.zeros((kk, 14), dtype=np.int64)
    cdef int64_t[:, ::1] ov = out
    s = np.empty((singles.shape[0], 2), dtype=np.int32)
    p = np.empty((pairs.shape[0], 2), dtype=np.int32)
    adj = np.empty((max(n, 1), max(n, 1)), dtype=np.uint8)
    cdef int32_t[:, ::1] sv = s
    cdef int32_t[:, ::1] pv = p
    cdef uint8_t[:, ::1] av = adj
    for k in range(kk):
        if singles.shape[0]:
            sv[:, :] = singles
        if pairs.shape[0]:
            pv[:, :] = pairs
        _fill_adj(av, sv, pv, n)
        _switch(sv, pv, av, prop_s[k], prop_p[k], keep_mutual)
        _census_into(av, n, lut, ov[k])
    return out
