"""Independent reference computations for the application kernels.

Each oracle is written against the raw workload arrays with stock numpy
or plain Python, deliberately avoiding the runtime's kernel code and the
jitted loops, so a bug there cannot cancel out in the comparison.
"""

from __future__ import annotations

from collections import deque

import numpy as np

UNREACHED = np.int32(2**31 - 1)


def bfs_distances(indptr, indices, source: int, n: int) -> np.ndarray:
    """Hop counts from source over a directed CSR graph."""
    dist = np.full(n, UNREACHED, dtype=np.int32)
    dist[source] = 0
    q = deque([source])
    while q:
        v = q.popleft()
        d = dist[v] + 1
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if dist[u] == UNREACHED:
                dist[u] = d
                q.append(u)
    return dist


def matmul_reference(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.matmul(a, b)


def spmv_reference(data, indices, indptr, x) -> np.ndarray:
    n = indptr.shape[0] - 1
    y = np.zeros(n, dtype=np.float64)
    for i in range(n):
        s, e = indptr[i], indptr[i + 1]
        y[i] = np.dot(data[s:e], x[indices[s:e]])
    return y


def nw_last_row(a, b, match: int, mismatch: int, gap: int) -> np.ndarray:
    """Final row of the global-alignment score matrix, boundary included."""
    m = b.shape[0]
    prev = np.arange(m + 1, dtype=np.int64) * gap
    cur = np.empty(m + 1, dtype=np.int64)
    for i in range(1, a.shape[0] + 1):
        cur[0] = i * gap
        sub = np.where(a[i - 1] == b, match, mismatch)
        diag = prev[:-1] + sub
        up = prev[1:] + gap
        cand = np.maximum(diag, up)
        run = cur[0]
        for j in range(1, m + 1):
            run = max(cand[j - 1], run + gap)
            cur[j] = run
        prev, cur = cur, prev
    return prev.astype(np.int32)
