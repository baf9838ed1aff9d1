"""Sparse matrix-vector multiply as one whole-band task per node.

Node i's address region is [y rows | x words]. Its single task computes
y_i = A[rows_i, :] @ x over the node's full CSR band, so the only remote
data is the x vector itself. The pieces of x live interleaved with y
across every region, and a token carries exactly one remote range, so
the task declares the covering span of the whole address space: the
acquisition splits per owner, self-owned words cost nothing, and the
unread y words ride along as padding. That is the usual price of a
contiguous-span fetch API, charged honestly to the essential ledger.

One acquisition per node means the per-owner pieces transfer in
parallel; chunked designs that fetch x one chunk per task pay a full
round trip per chunk instead, serialized by the wait queue head.
"""

from __future__ import annotations

import numpy as np

from ..addressing import AddressRange
from ..config import ScenarioConfig
from ..inputs import workload_for
from ..tokens import TaskToken
from .. import hotloops
from .base import RingApp, even_partitions, padded_size
from .oracles import spmv_reference

SPEEDUPS = (1.3, 2.4, 3.5)


class SPMVState:
    __slots__ = ("base", "m", "region", "data", "indices", "indptr")

    def __init__(self, base, m, region, data, indices, indptr):
        self.base = base
        self.m = m
        self.region = region     # [y_i | x_i], y and x are views into it
        self.data = data
        self.indices = indices   # global column ids
        self.indptr = indptr

    @property
    def y(self) -> np.ndarray:
        return self.region[:self.m]

    @property
    def x(self) -> np.ndarray:
        return self.region[self.m:]


class SPMVApp(RingApp):
    name = "spmv"
    bytes_per_address = 8

    def __init__(self, config: ScenarioConfig):
        self.config = config
        wl = workload_for(config)
        self.size = config.size
        p = wl.payload
        self._data = p["data"]
        self._indices = p["indices"]
        self._indptr = p["indptr"]
        self._x0 = p["x"]
        self._nodes = 0

    def register(self, registry) -> None:
        self.band_id = registry.task_register(
            "spmv_band", self.kernel, speedups=SPEEDUPS)
        self.seed_id = registry.task_register(
            "spmv_seed", self.seed_kernel, speedups=SPEEDUPS, is_root=True)

    def partitions(self, nodes: int) -> list[AddressRange]:
        self._nodes = nodes
        total = padded_size(self.size, nodes)
        self.padded = total - self.size
        self.n = total
        self.m = total // nodes
        self.x = np.zeros(total)
        self.x[:self.size] = self._x0
        self.region = 2 * self.m
        return even_partitions(nodes * self.region, nodes)

    def _region_range(self, i: int) -> AddressRange:
        return AddressRange(i * self.region, (i + 1) * self.region)

    def node_state(self, node_id: int, partition: AddressRange) -> SPMVState:
        r0 = min(node_id * self.m, self.size)
        r1 = min(r0 + self.m, self.size)
        s, e = int(self._indptr[r0]), int(self._indptr[r1])
        indptr = np.zeros(self.m + 1, dtype=np.int64)
        indptr[:r1 - r0 + 1] = self._indptr[r0:r1 + 1] - s
        indptr[r1 - r0 + 1:] = indptr[r1 - r0]
        region = np.zeros(2 * self.m)
        region[self.m:] = self.x[node_id * self.m:(node_id + 1) * self.m]
        return SPMVState(partition.start, self.m, region,
                         self._data[s:e], self._indices[s:e], indptr)

    def root_tokens(self) -> list[TaskToken]:
        return [TaskToken(self.seed_id, 0, AddressRange(0, 1))]

    def seed_kernel(self, ctx, token: TaskToken) -> None:
        n = self._nodes
        space = AddressRange(0, n * self.region)
        for i in range(n):
            rr = self._region_range(i)
            ctx.task_spawn(
                self.band_id, rr.start, rr.end, param=0,
                remote_start=space.start, remote_end=space.end,
            )
        ctx.charge(n)

    def kernel(self, ctx, token: TaskToken) -> None:
        rng = token.task_range
        ctx.assert_local(rng)
        st = ctx.local_state
        r0 = max(rng.start - st.base, 0)
        r1 = min(rng.end - st.base, st.m)
        if r1 <= r0:
            return           # split landed on the x half; nothing to do
        span = ctx.staged(token.remote_range)
        m, reg = st.m, 2 * st.m
        x_full = np.empty(self._nodes * m)
        for k in range(self._nodes):
            x_full[k * m:(k + 1) * m] = span[k * reg + m:(k + 1) * reg]
        s, e = st.indptr[r0], st.indptr[r1]
        y_part = hotloops.spmv_chunk(
            st.data[s:e], st.indices[s:e],
            np.ascontiguousarray(st.indptr[r0:r1 + 1] - s), x_full)
        ctx.charge(2 * int(e - s))

        def commit(st=st, r0=r0, r1=r1, y_part=y_part):
            st.y[r0:r1] += y_part

        ctx.on_commit(commit)

    def read_words(self, state: SPMVState, piece: AddressRange) -> np.ndarray:
        off = piece.start - state.base
        if off < 0 or piece.end - state.base > 2 * state.m:
            raise ValueError(f"remote read {piece} outside the node region")
        return state.region[off:off + len(piece)].copy()

    def result(self, states) -> dict[str, np.ndarray]:
        y = np.concatenate([st.y for st in states])
        return {"y": y[:self.size].copy()}

    def oracle(self) -> dict[str, np.ndarray]:
        return {"y": spmv_reference(self._data, self._indices,
                                    self._indptr, self._x0)}
