"""Numeric inner loops, compiled with numba when available.

Every loop ships in two interchangeable flavors: a jitted version and a
pure-numpy version. Setting RINGFLOW_PURE_NUMPY=1 (or running without
numba installed) selects the numpy path everywhere. Both flavors stay
importable side by side so the benchmark can compare them in one process.

The jitted and numpy flavors of the float kernels may differ in the last
ulp (different summation orders); integer kernels agree exactly.
"""

from __future__ import annotations

import os

import numpy as np

PURE_NUMPY = os.environ.get("RINGFLOW_PURE_NUMPY", "") == "1"

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:          # pragma: no cover - exercised via env flag instead
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def deco(fn):
            return fn
        return deco


# -- dense tile product -------------------------------------------------------

def _gemm_tile_loop(a, b):
    m, kk = a.shape
    n = b.shape[1]
    out = np.zeros((m, n), dtype=np.float64)
    for i in range(m):
        for k in range(kk):
            aik = a[i, k]
            for j in range(n):
                out[i, j] += aik * b[k, j]
    return out


def gemm_tile_py(a, b):
    return a @ b


# -- sparse chunk matvec ------------------------------------------------------

def _spmv_chunk_loop(data, indices, indptr, x):
    nrows = indptr.shape[0] - 1
    y = np.zeros(nrows, dtype=np.float64)
    for i in range(nrows):
        acc = 0.0
        for e in range(indptr[i], indptr[i + 1]):
            acc += data[e] * x[indices[e]]
        y[i] = acc
    return y


def spmv_chunk_py(data, indices, indptr, x):
    nrows = indptr.shape[0] - 1
    counts = np.diff(indptr)
    rows = np.repeat(np.arange(nrows), counts)
    y = np.zeros(nrows, dtype=np.float64)
    np.add.at(y, rows, data * x[indices])
    return y


# -- alignment scoring --------------------------------------------------------

def _nw_block_loop(a_blk, b_blk, north, west, match, mismatch, gap):
    nb = a_blk.shape[0]
    mb = b_blk.shape[0]
    h = np.empty((nb + 1, mb + 1), dtype=np.int32)
    h[0, :] = north
    h[:, 0] = west
    for i in range(1, nb + 1):
        for j in range(1, mb + 1):
            s = match if a_blk[i - 1] == b_blk[j - 1] else mismatch
            diag = h[i - 1, j - 1] + s
            up = h[i - 1, j] + gap
            left = h[i, j - 1] + gap
            best = diag
            if up > best:
                best = up
            if left > best:
                best = left
            h[i, j] = best
    return h


def nw_block_py(a_blk, b_blk, north, west, match, mismatch, gap):
    # row-at-a-time; the in-row dependency keeps the inner walk scalar
    nb = a_blk.shape[0]
    mb = b_blk.shape[0]
    h = np.empty((nb + 1, mb + 1), dtype=np.int32)
    h[0, :] = north
    h[:, 0] = west
    for i in range(1, nb + 1):
        sub = np.where(a_blk[i - 1] == b_blk, match, mismatch).astype(np.int32)
        diag = h[i - 1, :-1] + sub
        up = h[i - 1, 1:] + gap
        cand = np.maximum(diag, up)
        row = h[i]
        for j in range(1, mb + 1):
            left = row[j - 1] + gap
            row[j] = cand[j - 1] if cand[j - 1] >= left else left
    return h


def _nw_full_loop(a, b, match, mismatch, gap):
    n = a.shape[0]
    m = b.shape[0]
    h = np.empty((n + 1, m + 1), dtype=np.int32)
    for j in range(m + 1):
        h[0, j] = j * gap
    for i in range(1, n + 1):
        h[i, 0] = i * gap
        for j in range(1, m + 1):
            s = match if a[i - 1] == b[j - 1] else mismatch
            diag = h[i - 1, j - 1] + s
            up = h[i - 1, j] + gap
            left = h[i, j - 1] + gap
            best = diag
            if up > best:
                best = up
            if left > best:
                best = left
            h[i, j] = best
    return h


def nw_full_py(a, b, match, mismatch, gap):
    n = a.shape[0]
    m = b.shape[0]
    north = (np.arange(m + 1, dtype=np.int32) * gap).astype(np.int32)
    west = (np.arange(n + 1, dtype=np.int32) * gap).astype(np.int32)
    return nw_block_py(a, b, north, west, match, mismatch, gap)


# -- path selection -----------------------------------------------------------

if HAVE_NUMBA:
    gemm_tile_jit = njit(cache=True)(_gemm_tile_loop)
    spmv_chunk_jit = njit(cache=True)(_spmv_chunk_loop)
    nw_block_jit = njit(cache=True)(_nw_block_loop)
    nw_full_jit = njit(cache=True)(_nw_full_loop)
else:
    gemm_tile_jit = _gemm_tile_loop
    spmv_chunk_jit = _spmv_chunk_loop
    nw_block_jit = _nw_block_loop
    nw_full_jit = _nw_full_loop

if PURE_NUMPY or not HAVE_NUMBA:
    ACTIVE_PATH = "numpy"
    gemm_tile = gemm_tile_py
    spmv_chunk = spmv_chunk_py
    nw_block = nw_block_py
    nw_full = nw_full_py
else:
    ACTIVE_PATH = "numba"
    gemm_tile = gemm_tile_jit
    spmv_chunk = spmv_chunk_jit
    nw_block = nw_block_jit
    nw_full = nw_full_jit
