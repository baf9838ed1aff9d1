"""Hop-count shortest path over a level matrix, relaxed token by token.

The graph lives as an n x n int32 matrix M partitioned by row. A cell
starts at UNREACHED where an edge exists and 0 where none does. A relax
task for vertex range [a,b) at level L rewrites every cell M[v][j] > L
to L and spawns a level-L+1 task for each newly touched column j. The
final distance of j is the smallest level written anywhere in column j;
re-relaxations at lower levels keep every commit monotone, so the result
is independent of arrival order.

Root levels are 1-based so a written level can never collide with the
0 that marks a missing edge.
"""

from __future__ import annotations

import numpy as np

from ..addressing import AddressRange
from ..config import ScenarioConfig
from ..inputs import workload_for
from ..tokens import TaskToken
from .base import RingApp, even_partitions, padded_size
from .oracles import UNREACHED, bfs_distances

SPEEDUPS = (8.2, 16.4, 21.8)


class SSSPState:
    __slots__ = ("base", "rows")

    def __init__(self, base: int, rows: np.ndarray):
        self.base = base
        self.rows = rows


class SSSPApp(RingApp):
    name = "sssp"
    bytes_per_address = 4

    def __init__(self, config: ScenarioConfig):
        self.config = config
        wl = workload_for(config)
        self.indptr = wl.payload["indptr"]
        self.indices = wl.payload["indices"]
        self.n = config.size
        self.source = config.source
        self.task_id = 0
        self._nodes = 0
        self._dist_oracle = None

    def register(self, registry) -> None:
        self.task_id = registry.task_register(
            "relax", self.kernel, speedups=SPEEDUPS, is_root=True)

    def partitions(self, nodes: int) -> list[AddressRange]:
        self._nodes = nodes
        total = padded_size(self.n, nodes)
        self.padded = total - self.n
        m = np.zeros((total, total), dtype=np.int32)
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        m[rows, self.indices] = UNREACHED
        self.m = m
        return even_partitions(total, nodes)

    def node_state(self, node_id: int, partition: AddressRange) -> SSSPState:
        return SSSPState(partition.start,
                         self.m[partition.start:partition.end])

    def root_tokens(self) -> list[TaskToken]:
        per = self.m.shape[0] // self._nodes
        owner = self.source // per
        return [TaskToken(self.task_id, owner,
                          AddressRange(self.source, self.source + 1),
                          param=1)]

    def kernel(self, ctx, token: TaskToken) -> None:
        rng = token.task_range
        ctx.assert_local(rng)
        st = ctx.local_state
        a = rng.start - st.base
        b = rng.end - st.base
        level = token.param
        rows = st.rows[a:b]
        improved = rows > level
        ctx.charge(rows.size)
        ctx.ledger.duplicate_relaxations += int((~improved.any(axis=1)).sum())
        targets = np.nonzero(improved.any(axis=0))[0]
        for j in targets:
            ctx.task_spawn(self.task_id, int(j), int(j) + 1, param=level + 1)

        def commit(rows=rows, improved=improved, level=level):
            np.minimum(rows, np.where(improved, level, UNREACHED), out=rows)

        ctx.on_commit(commit)

    def result(self, states) -> dict[str, np.ndarray]:
        written = (self.m >= 1) & (self.m < UNREACHED)
        dist = np.where(written, self.m, UNREACHED).min(axis=0)
        dist = dist.astype(np.int32)
        dist[self.source] = 0
        return {"dist": dist[:self.n]}

    def oracle(self) -> dict[str, np.ndarray]:
        if self._dist_oracle is None:
            self._dist_oracle = bfs_distances(
                self.indptr, self.indices, self.source, self.n)
        return {"dist": self._dist_oracle}
