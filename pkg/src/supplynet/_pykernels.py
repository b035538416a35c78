"""Pure-Python/numpy implementations of the hot kernels.

Used when the compiled extension is unavailable or SUPPLYNET_PURE_PYTHON=1.
Outputs match ``_ckernels`` exactly for identical inputs.
"""

from __future__ import annotations

from collections import deque
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=32)
def _triples(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if n < 3:
        e = np.zeros(0, dtype=np.intp)
        return e, e, e
    idx = np.array(
        [(i, j, k) for i in range(n) for j in range(i + 1, n) for k in range(j + 1, n)],
        dtype=np.intp,
    )
    return idx[:, 0], idx[:, 1], idx[:, 2]


def triad_census(adj: np.ndarray, lut: np.ndarray) -> np.ndarray:
    n = adj.shape[0]
    i, j, k = _triples(n)
    a = adj.astype(np.int64, copy=False)
    code = (
        (a[i, j] << 5) | (a[i, k] << 4) | (a[j, i] << 3)
        | (a[j, k] << 2) | (a[k, i] << 1) | a[k, j]
    )
    return np.bincount(lut[code], minlength=14).astype(np.int64)


def _out_lists(edges: np.ndarray, n: int) -> list[list[tuple[int, int]]]:
    out: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for e, (u, v) in enumerate(edges.tolist()):
        out[u].append((v, e))
    return out


def _bfs(out, producer, demander, skip: int):
    n = len(out)
    parent = [-1] * n
    seen = [False] * n
    queue = deque(v for v in range(n) if producer[v])
    for v in queue:
        seen[v] = True
    count = 0
    while queue:
        v = queue.popleft()
        if demander[v]:
            count += 1
        for w, e in out[v]:
            if e != skip and not seen[w]:
                seen[w] = True
                parent[w] = e
                queue.append(w)
    return count, parent


def satisfied_count(edges, n, producer, demander) -> int:
    return _bfs(_out_lists(edges, n), producer, demander, -1)[0]


def removable_edges(edges, n, producer, demander):
    out = _out_lists(edges, n)
    base, parent = _bfs(out, producer, demander, -1)
    mask = np.ones(len(edges), dtype=np.uint8)
    for e in parent:
        if e >= 0 and _bfs(out, producer, demander, e)[0] < base:
            mask[e] = 0
    return mask, base


def _switch(singles, pairs, adj, prop_s, prop_p, keep_mutual):
    for i, j in prop_s.tolist():
        if i == j:
            continue
        a, b = singles[i]
        c, d = singles[j]
        if a == d or c == b:
            continue
        if adj[a][d] or adj[c][b]:
            continue
        if keep_mutual and (adj[d][a] or adj[b][c]):
            continue
        adj[a][b] = adj[c][d] = 0
        adj[a][d] = adj[c][b] = 1
        singles[i] = [a, d]
        singles[j] = [c, b]
    for i, j, flip in prop_p.tolist():
        if i == j:
            continue
        a, b = pairs[i]
        c, d = pairs[j]
        if flip:
            c, d = d, c
        if a == d or c == b:
            continue
        if adj[a][d] or adj[d][a] or adj[c][b] or adj[b][c]:
            continue
        adj[a][b] = adj[b][a] = adj[c][d] = adj[d][c] = 0
        adj[a][d] = adj[d][a] = adj[c][b] = adj[b][c] = 1
        pairs[i] = [a, d]
        pairs[j] = [c, b]


def _adj_lists(singles, pairs, n):
    adj = [[0] * n for _ in range(n)]
    for u, v in singles:
        adj[u][v] = 1
    for u, v in pairs:
        adj[u][v] = adj[v][u] = 1
    return adj


def switch_randomize(singles, pairs, n, prop_s, prop_p, keep_mutual):
    s = np.asarray(singles).reshape(-1, 2).tolist()
    p = np.asarray(pairs).reshape(-1, 2).tolist()
    adj = _adj_lists(s, p, n)
    _switch(s, p, adj, prop_s, prop_p, keep_mutual)
    return (
        np.array(s, dtype=np.int32).reshape(-1, 2),
        np.array(p, dtype=np.int32).reshape(-1, 2),
    )


def ensemble_census(singles, pairs, n, prop_s, prop_p, keep_mutual, lut):
    kk = prop_s.shape[0]
    out = np.zeros((kk, 14), dtype=np.int64)
    base_s = np.asarray(singles).reshape(-1, 2).tolist()
    base_p = np.asarray(pairs).reshape(-1, 2).tolist()
    for k in range(kk):
        s = [list(e) for e in base_s]
        p = [list(e) for e in base_p]
        adj = _adj_lists(s, p, n)
        _switch(s, p, adj, prop_s[k], prop_p[k], keep_mutual)
        out[k] = triad_census(np.array(adj, dtype=np.uint8).reshape(n, n), lut)
    return out
