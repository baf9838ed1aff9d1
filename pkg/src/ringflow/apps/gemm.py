"""Dense matrix multiply as rank-band partial tasks.

Every node owns a horizontal band of A, C, and B, laid out in its
address region as [A rows | C rows | B rows], one address per float64.
The work unit (i, k) adds A_i[:, k-band] @ B_k into C_i; it executes on
the node owning C_i and names B_k through its remote range, so the
fetch is essential data movement. A seed task on node 0 spawns the full
(i, k) wave.

Tasks are range-driven over C rows, so a token split by the dispatcher
computes exactly its sub-band and the partial sums still compose.
"""

from __future__ import annotations

import numpy as np

from ..addressing import AddressRange
from ..config import ScenarioConfig
from ..inputs import workload_for
from ..tokens import TaskToken
from .. import hotloops
from .base import RingApp, even_partitions, padded_size
from .oracles import matmul_reference

SPEEDUPS = (1.3, 2.4, 3.5)


class GEMMState:
    __slots__ = ("base", "a", "c", "b", "m", "n")

    def __init__(self, base, a, c, b):
        self.base = base
        self.a = a
        self.c = c
        self.b = b
        self.m, self.n = a.shape


class GEMMApp(RingApp):
    name = "gemm"
    bytes_per_address = 8

    def __init__(self, config: ScenarioConfig):
        self.config = config
        wl = workload_for(config)
        self.size = config.size
        self._a0 = wl.payload["a"]
        self._b0 = wl.payload["b"]
        self._nodes = 0

    def register(self, registry) -> None:
        self.part_id = registry.task_register(
            "gemm_part", self.kernel, speedups=SPEEDUPS)
        self.seed_id = registry.task_register(
            "gemm_seed", self.seed_kernel, speedups=SPEEDUPS, is_root=True)

    def partitions(self, nodes: int) -> list[AddressRange]:
        self._nodes = nodes
        total = padded_size(self.size, nodes)
        self.padded = total - self.size
        self.n = total
        self.m = total // nodes
        self.a = np.zeros((total, total))
        self.b = np.zeros((total, total))
        self.a[:self.size, :self.size] = self._a0
        self.b[:self.size, :self.size] = self._b0
        self.c = np.zeros((total, total))
        self.region = 3 * self.m * total
        return even_partitions(nodes * self.region, nodes)

    def _c_range(self, i: int) -> AddressRange:
        mn = self.m * self.n
        return AddressRange(i * self.region + mn, i * self.region + 2 * mn)

    def _b_range(self, k: int) -> AddressRange:
        mn = self.m * self.n
        return AddressRange(k * self.region + 2 * mn, k * self.region + 3 * mn)

    def node_state(self, node_id: int, partition: AddressRange) -> GEMMState:
        s = node_id * self.m
        e = s + self.m
        return GEMMState(partition.start, self.a[s:e], self.c[s:e], self.b[s:e])

    def root_tokens(self) -> list[TaskToken]:
        return [TaskToken(self.seed_id, 0, AddressRange(0, 1))]

    def seed_kernel(self, ctx, token: TaskToken) -> None:
        # k-outer order interleaves destinations on the ring. Spawning all
        # of one node's tasks back to back parks them in that node's
        # 8-entry wait queue and stalls every token queued behind them.
        n = self._nodes
        for k in range(n):
            remote = self._b_range(k)
            for i in range(n):
                crange = self._c_range(i)
                ctx.task_spawn(
                    self.part_id, crange.start, crange.end, param=k,
                    remote_start=remote.start if k != i else 0,
                    remote_end=remote.end if k != i else 0,
                )
        ctx.charge(n * n)

    def kernel(self, ctx, token: TaskToken) -> None:
        rng = token.task_range
        ctx.assert_local(rng)
        st = ctx.local_state
        mn = st.m * st.n
        off0 = rng.start - st.base - mn
        off1 = rng.end - st.base - mn
        if not 0 <= off0 < off1 <= mn or off0 % st.n or off1 % st.n:
            raise ValueError(
                f"task range {rng} is not row-aligned within the local "
                f"result region")
        r0 = off0 // st.n
        r1 = off1 // st.n
        k = token.param
        if token.remote_range.empty:
            b_rows = st.b
        else:
            b_rows = ctx.staged(token.remote_range).reshape(st.m, st.n)
        a_band = np.ascontiguousarray(
            st.a[r0:r1, k * st.m:(k + 1) * st.m])
        part = hotloops.gemm_tile(a_band, b_rows)
        ctx.charge(2 * (r1 - r0) * st.m * st.n)

        def commit(st=st, r0=r0, r1=r1, part=part):
            st.c[r0:r1] += part

        ctx.on_commit(commit)

    def read_words(self, state: GEMMState, piece: AddressRange) -> np.ndarray:
        b_start = state.base + 2 * state.m * state.n
        off = piece.start - b_start
        if off < 0 or piece.end - b_start > state.m * state.n:
            raise ValueError(f"remote read {piece} outside the B band")
        return state.b.reshape(-1)[off:off + len(piece)].copy()

    def result(self, states) -> dict[str, np.ndarray]:
        return {"c": self.c[:self.size, :self.size].copy()}

    def oracle(self) -> dict[str, np.ndarray]:
        return {"c": matmul_reference(self._a0, self._b0)}
