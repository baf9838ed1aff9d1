"""Kernel apps: oracle equivalence on small instances, range validation,
serial replay, and cross-checks between independent reference solvers.
"""

import numpy as np
import pytest

from ringflow import hotloops
from ringflow.addressing import AddressRange
from ringflow.apps import build_app, bsp_run, serial_replay
from ringflow.apps.oracles import (UNREACHED, bfs_distances, matmul_reference,
                                   nw_last_row, spmv_reference)
from ringflow.config import ConfigError, ScenarioConfig
from ringflow.simulator import Simulator
from ringflow.tokens import TaskToken

from synthapps import MiniCtx

SMALL = {
    "sssp": dict(size=48, density=0.1),
    "gemm": dict(size=16),
    "spmv": dict(size=48, density=0.3),
    "nw":   dict(size=32, block=16),
}


def make_cfg(kernel: str, **kw) -> ScenarioConfig:
    base = dict(kernel=kernel, seed=7, nodes=2)
    base.update(SMALL[kernel])
    base.update(kw)
    cfg = ScenarioConfig(**base)
    cfg.validate()
    return cfg


@pytest.mark.parametrize("kernel", list(SMALL))
@pytest.mark.parametrize("nodes", [1, 4])
def test_ring_run_matches_oracle(kernel, nodes):
    cfg = make_cfg(kernel, nodes=nodes)
    app = build_app(cfg)
    rr = Simulator(cfg, app).run()
    assert app.check(rr.result) == []


@pytest.mark.parametrize("kernel", list(SMALL))
@pytest.mark.parametrize("nodes", [1, 4])
def test_bulk_synchronous_run_matches_oracle(kernel, nodes):
    cfg = make_cfg(kernel, nodes=nodes, model="bsp")
    app = build_app(cfg)
    br = bsp_run(cfg, app)
    assert app.check(br.result) == []
    assert br.cycles > 0 and br.bytes_moved >= 0 and br.supersteps >= 1


@pytest.mark.parametrize("kernel", list(SMALL))
def test_serial_replay_matches_oracle(kernel):
    cfg = make_cfg(kernel, nodes=4)
    stats = serial_replay(cfg, build_app)
    assert build_app(cfg).check(stats.result) == []
    assert stats.tasks > 0 and stats.ops > 0 and stats.cycles > 0


def test_unknown_kernel_rejected():
    cfg = ScenarioConfig()
    object.__setattr__(cfg, "kernel", "fft")
    with pytest.raises(ConfigError):
        build_app(cfg)


# -- GEMM range discipline ---------------------------------------------------

def gemm_fixture():
    cfg = make_cfg("gemm", nodes=1)
    app = build_app(cfg)
    parts = app.partitions(1)
    state = app.node_state(0, parts[0])
    return app, state, parts[0]


def test_gemm_rejects_row_misaligned_task():
    app, state, part = gemm_fixture()
    mn = state.m * state.n
    ctx = MiniCtx(state, part)
    bad = TaskToken(0, 0, AddressRange(mn + 1, mn + 1 + state.n))
    with pytest.raises(ValueError):
        app.kernel(ctx, bad)


def test_gemm_rejects_short_row_task():
    app, state, part = gemm_fixture()
    mn = state.m * state.n
    ctx = MiniCtx(state, part)
    bad = TaskToken(0, 0, AddressRange(mn, mn + state.n - 4))
    with pytest.raises(ValueError):
        app.kernel(ctx, bad)


def test_gemm_aligned_task_accumulates_partial_product():
    app, state, part = gemm_fixture()
    mn = state.m * state.n
    ctx = MiniCtx(state, part)
    tok = TaskToken(0, 0, AddressRange(mn, mn + state.n), param=0)
    app.kernel(ctx, tok)
    for fn in ctx.commits:
        fn()
    expect = state.a[0:1, :state.m] @ state.b
    np.testing.assert_allclose(state.c[0:1], expect, rtol=1e-12)
    assert ctx.ops == 2 * state.m * state.n


def test_gemm_read_words_outside_b_band():
    app, state, _ = gemm_fixture()
    mn = state.m * state.n
    with pytest.raises(ValueError):
        app.read_words(state, AddressRange(2 * mn - 4, 2 * mn + 4))
    with pytest.raises(ValueError):
        app.read_words(state, AddressRange(3 * mn - 4, 3 * mn + 4))


def test_gemm_read_words_inside_b_band():
    app, state, _ = gemm_fixture()
    mn = state.m * state.n
    got = app.read_words(state, AddressRange(2 * mn, 2 * mn + state.n))
    np.testing.assert_array_equal(got, state.b[0])


# -- SPMV region discipline ----------------------------------------------------

def test_spmv_read_words_bounds():
    cfg = make_cfg("spmv", nodes=2)
    app = build_app(cfg)
    parts = app.partitions(2)
    state = app.node_state(1, parts[1])
    with pytest.raises(ValueError):
        app.read_words(state, AddressRange(parts[1].start - 1, parts[1].start + 3))
    with pytest.raises(ValueError):
        app.read_words(state, AddressRange(parts[1].end - 2, parts[1].end + 2))
    got = app.read_words(state, AddressRange(parts[1].start, parts[1].end))
    np.testing.assert_array_equal(got, state.region)


@pytest.mark.parametrize("model", ["arena", "bsp"])
def test_spmv_padding_when_size_not_divisible(model):
    cfg = make_cfg("spmv", size=50, nodes=4, model=model)
    app = build_app(cfg)
    if model == "arena":
        rr = Simulator(cfg, app).run()
        result = rr.result
        assert rr.ledger.padded_size > 0
    else:
        result = bsp_run(cfg, app).result
    assert app.check(result) == []
    assert result["y"].shape == (50,)


# -- NW shape constraints -----------------------------------------------------

def test_nw_rejects_size_not_multiple_of_block():
    with pytest.raises(ConfigError):
        build_app(make_cfg("nw", size=40, block=16))


def test_nw_rejects_grid_not_divisible_by_nodes():
    # 32/16 gives a 2x2 grid of 4 blocks; 4 % 3 != 0
    app = build_app(make_cfg("nw", size=32, block=16, nodes=3))
    with pytest.raises(ConfigError):
        app.partitions(3)


def test_nw_larger_grid_runs():
    cfg = make_cfg("nw", size=64, block=16, nodes=4)
    app = build_app(cfg)
    rr = Simulator(cfg, app).run()
    assert app.check(rr.result) == []


# -- oracle cross-checks --------------------------------------------------------

def test_bfs_distances_vs_naive():
    rng = np.random.default_rng(0)
    n = 40
    mask = rng.random((n, n)) < 0.08
    np.fill_diagonal(mask, False)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(mask.sum(axis=1), out=indptr[1:])
    indices = np.nonzero(mask)[1].astype(np.int32)

    # Bellman-Ford relaxation over unit weights, entirely unlike the BFS
    dist = np.full(n, UNREACHED, dtype=np.int64)
    dist[0] = 0
    for _ in range(n):
        for u in range(n):
            if dist[u] == UNREACHED:
                continue
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if dist[u] + 1 < dist[v]:
                    dist[v] = dist[u] + 1

    np.testing.assert_array_equal(bfs_distances(indptr, indices, 0, n), dist)


def test_matmul_reference_vs_numpy():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((12, 12))
    b = rng.standard_normal((12, 12))
    np.testing.assert_allclose(matmul_reference(a, b), a @ b, rtol=1e-12)


def test_spmv_reference_vs_dense():
    rng = np.random.default_rng(2)
    n = 30
    dense = rng.standard_normal((n, n)) * (rng.random((n, n)) < 0.3)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum((dense != 0).sum(axis=1), out=indptr[1:])
    indices = np.nonzero(dense)[1].astype(np.int32)
    data = dense[dense != 0]
    x = rng.standard_normal(n)
    np.testing.assert_allclose(
        spmv_reference(data, indices, indptr, x), dense @ x, rtol=1e-12)


def test_nw_last_row_vs_full_matrix():
    rng = np.random.default_rng(3)
    a = rng.integers(0, 4, 24, dtype=np.int8)
    b = rng.integers(0, 4, 24, dtype=np.int8)
    full = hotloops.nw_full_py(a, b, 1, -1, -1)
    np.testing.assert_array_equal(nw_last_row(a, b, 1, -1, -1), full[-1])


def test_nw_known_alignment_score():
    # identical sequences score match * length
    a = np.array([0, 1, 2, 3, 0, 1], dtype=np.int8)
    assert nw_last_row(a, a, 1, -1, -1)[-1] == 6
    # completely different single letters: best is one mismatch
    x = np.array([0], dtype=np.int8)
    y = np.array([1], dtype=np.int8)
    assert nw_last_row(x, y, 1, -1, -1)[-1] == -1
