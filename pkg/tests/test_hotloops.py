"""Jitted and pure-numpy flavors of every inner loop must agree."""

import os
import subprocess
import sys

import numpy as np
import pytest

from ringflow import hotloops as hl

rng = np.random.default_rng(17)


def test_active_path_is_declared():
    assert hl.ACTIVE_PATH in ("numba", "numpy")
    assert hl.gemm_tile is (hl.gemm_tile_py if hl.ACTIVE_PATH == "numpy"
                            else hl.gemm_tile_jit)


@pytest.mark.parametrize("shape", [(1, 1), (4, 7), (16, 16)])
def test_gemm_tile_flavors_agree(shape):
    r, m = shape
    a = rng.standard_normal((r, m))
    b = rng.standard_normal((m, m))
    np.testing.assert_allclose(hl.gemm_tile_jit(a, b), hl.gemm_tile_py(a, b),
                               rtol=1e-12)


def test_gemm_tile_matches_numpy():
    a = rng.standard_normal((8, 8))
    b = rng.standard_normal((8, 8))
    np.testing.assert_allclose(hl.gemm_tile_py(a, b), a @ b, rtol=1e-12)


def test_spmv_chunk_flavors_agree():
    n = 64
    dense = rng.standard_normal((n, n)) * (rng.random((n, n)) < 0.25)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum((dense != 0).sum(axis=1), out=indptr[1:])
    indices = np.nonzero(dense)[1].astype(np.int32)
    data = dense[dense != 0]
    x = rng.standard_normal(n)
    np.testing.assert_allclose(
        hl.spmv_chunk_jit(data, indices, indptr, x),
        hl.spmv_chunk_py(data, indices, indptr, x), rtol=1e-12)
    np.testing.assert_allclose(
        hl.spmv_chunk_py(data, indices, indptr, x), dense @ x, rtol=1e-12)


def test_spmv_chunk_empty_rows():
    data = np.array([2.0])
    indices = np.array([1], dtype=np.int32)
    indptr = np.array([0, 0, 1, 1], dtype=np.int64)
    x = np.array([5.0, 7.0, 9.0])
    got = hl.spmv_chunk_py(data, indices, indptr, x)
    np.testing.assert_allclose(got, [0.0, 14.0, 0.0])
    np.testing.assert_allclose(hl.spmv_chunk_jit(data, indices, indptr, x), got)


def test_nw_block_flavors_agree_exactly():
    for _ in range(10):
        nb, mb = int(rng.integers(1, 17)), int(rng.integers(1, 17))
        a_blk = rng.integers(0, 4, nb, dtype=np.int8)
        b_blk = rng.integers(0, 4, mb, dtype=np.int8)
        north = rng.integers(-50, 50, mb + 1).astype(np.int32)
        west = rng.integers(-50, 50, nb + 1).astype(np.int32)
        west[0] = north[0]
        np.testing.assert_array_equal(
            hl.nw_block_jit(a_blk, b_blk, north, west, 1, -1, -1),
            hl.nw_block_py(a_blk, b_blk, north, west, 1, -1, -1))


def test_nw_full_flavors_agree_exactly():
    a = rng.integers(0, 4, 40, dtype=np.int8)
    b = rng.integers(0, 4, 33, dtype=np.int8)
    np.testing.assert_array_equal(hl.nw_full_jit(a, b, 2, -1, -2),
                                  hl.nw_full_py(a, b, 2, -1, -2))


def test_nw_blocked_equals_full():
    # stitching blocks via shared boundary rows reproduces the full matrix
    n = 32
    blk = 16
    a = rng.integers(0, 4, n, dtype=np.int8)
    b = rng.integers(0, 4, n, dtype=np.int8)
    full = hl.nw_full_py(a, b, 1, -1, -1)
    for bi in range(n // blk):
        for bj in range(n // blk):
            r0, c0 = bi * blk, bj * blk
            north = full[r0, c0:c0 + blk + 1].astype(np.int32)
            west = full[r0:r0 + blk + 1, c0].astype(np.int32)
            h = hl.nw_block_py(a[r0:r0 + blk], b[c0:c0 + blk],
                               north, west, 1, -1, -1)
            np.testing.assert_array_equal(
                h, full[r0:r0 + blk + 1, c0:c0 + blk + 1])


def test_pure_numpy_env_flag_selects_numpy_path():
    code = ("import ringflow.hotloops as hl; print(hl.ACTIVE_PATH)")
    env = dict(os.environ, RINGFLOW_PURE_NUMPY="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


@pytest.mark.skipif(not hl.HAVE_NUMBA, reason="numba not installed")
def test_default_env_selects_numba_path():
    code = ("import ringflow.hotloops as hl; print(hl.ACTIVE_PATH)")
    env = {k: v for k, v in os.environ.items() if k != "RINGFLOW_PURE_NUMPY"}
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numba"
