"""Compare the jitted and pure-numpy flavors of every inner loop.

Both flavors stay importable side by side, so one process can time them
against each other regardless of which one the simulator is configured
to use. Run:

    python benchmarks/bench_hotloops.py --size 256 --reps 5
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from ringflow import hotloops as hl


def make_cases(size: int, seed: int):
    rng = np.random.default_rng(seed)
    n = size

    a = rng.standard_normal((n, n))
    b = rng.standard_normal((n, n))

    dense = rng.standard_normal((n, n)) * (rng.random((n, n)) < 0.3)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum((dense != 0).sum(axis=1), out=indptr[1:])
    indices = np.nonzero(dense)[1].astype(np.int32)
    data = dense[dense != 0]
    x = rng.standard_normal(n)

    sa = rng.integers(0, 4, n, dtype=np.int8)
    sb = rng.integers(0, 4, n, dtype=np.int8)
    blk = min(64, n)
    north = np.arange(blk + 1, dtype=np.int32) * -1
    west = np.arange(blk + 1, dtype=np.int32) * -1

    return [
        ("gemm_tile", hl.gemm_tile_jit, hl.gemm_tile_py, (a, b)),
        ("spmv_chunk", hl.spmv_chunk_jit, hl.spmv_chunk_py,
         (data, indices, indptr, x)),
        ("nw_block", hl.nw_block_jit, hl.nw_block_py,
         (sa[:blk], sb[:blk], north, west, 1, -1, -1)),
        ("nw_full", hl.nw_full_jit, hl.nw_full_py, (sa, sb, 1, -1, -1)),
    ]


def best_of(fn, args, reps: int) -> float:
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=reps))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=256,
                        help="problem edge length (default 256)")
    parser.add_argument("--reps", type=int, default=5,
                        help="timing repetitions, best is kept (default 5)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print(f"numba available: {hl.HAVE_NUMBA}   active path: {hl.ACTIVE_PATH}")
    print(f"size={args.size} reps={args.reps}\n")
    header = f"{'loop':<12} {'jit (ms)':>10} {'numpy (ms)':>11} {'speedup':>8}"
    print(header)
    print("-" * len(header))

    for name, jit_fn, py_fn, call_args in make_cases(args.size, args.seed):
        jit_fn(*call_args)     # compile before timing
        t_jit = best_of(jit_fn, call_args, args.reps)
        t_py = best_of(py_fn, call_args, args.reps)
        ratio = t_py / t_jit if t_jit > 0 else float("inf")
        print(f"{name:<12} {t_jit * 1e3:>10.3f} {t_py * 1e3:>11.3f} "
              f"{ratio:>7.1f}x")

    if not hl.HAVE_NUMBA:
        print("\nnumba is not installed: the jit column above ran the same "
              "plain-python loops, so the comparison is meaningless here.")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
