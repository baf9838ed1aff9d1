"""Global sequence alignment as a wavefront of score blocks.

The (n+1) x (n+1) score matrix is tiled into B x B blocks. A block's
task needs its north edge row and west edge column, each B+1 values
including the shared corner; it produces its own south and east edges.
Each computed block spawns its south and east children with the remote
range naming the parent edge the child must fetch.

Address layout: block q owns a stretch of 2(B+1)+1 addresses — one task
handle followed by the south then east edge words. Blocks are dealt to
nodes in row-major runs, so a child usually lives with its parent and
the fetch is local.

A block with both parents inside the grid receives two tokens; only the
arrival that completes the set computes, the other is a one-op
bookkeeping task. Arrival counting and edge capture happen at launch
(they are input plumbing), while the computed edges commit at
completion like any other result.
"""

from __future__ import annotations

import numpy as np

from ..addressing import AddressRange
from ..config import ConfigError, ScenarioConfig
from ..inputs import workload_for
from ..tokens import TaskToken
from .. import hotloops
from .base import RingApp, even_partitions
from .oracles import nw_last_row

SPEEDUPS = (1.3, 2.4, 3.5)


class NWState:
    __slots__ = ("first_block", "south_store", "east_store",
                 "arrived", "north_in", "west_in")

    def __init__(self, first_block: int, nb: int, b: int):
        self.first_block = first_block
        self.south_store = np.zeros((nb, b + 1), dtype=np.int32)
        self.east_store = np.zeros((nb, b + 1), dtype=np.int32)
        self.arrived = np.zeros(nb, dtype=np.int16)
        self.north_in = np.zeros((nb, b + 1), dtype=np.int32)
        self.west_in = np.zeros((nb, b + 1), dtype=np.int32)


class NWApp(RingApp):
    name = "nw"
    bytes_per_address = 4

    def __init__(self, config: ScenarioConfig):
        self.config = config
        wl = workload_for(config)
        self.a = wl.payload["a"]
        self.b = wl.payload["b"]
        self.n = config.size
        self.blk = config.block
        self.match = config.match_score
        self.mismatch = config.mismatch_score
        self.gap = config.gap_score
        if self.n % self.blk:
            raise ConfigError(
                f"size {self.n} is not a multiple of block {self.blk}")
        self.grid = self.n // self.blk
        self.stride = 2 * (self.blk + 1) + 1
        self._nodes = 0

    def register(self, registry) -> None:
        self.task_id = registry.task_register(
            "nw_block", self.kernel, speedups=SPEEDUPS, is_root=True)

    def partitions(self, nodes: int) -> list[AddressRange]:
        nblocks = self.grid * self.grid
        if nblocks % nodes:
            raise ConfigError(
                f"{nblocks} blocks do not divide across {nodes} nodes; "
                f"pick size/block so (size/block)^2 is a multiple of nodes")
        self._nodes = nodes
        self.nb = nblocks // nodes
        return even_partitions(nblocks * self.stride, nodes)

    def node_state(self, node_id: int, partition: AddressRange) -> NWState:
        return NWState(node_id * self.nb, self.nb, self.blk)

    def root_tokens(self) -> list[TaskToken]:
        return [TaskToken(self.task_id, 0, AddressRange(0, 1))]

    def _south_range(self, q: int) -> AddressRange:
        base = q * self.stride
        return AddressRange(base + 1, base + self.blk + 2)

    def _east_range(self, q: int) -> AddressRange:
        base = q * self.stride
        return AddressRange(base + self.blk + 2, base + 2 * self.blk + 3)

    def kernel(self, ctx, token: TaskToken) -> None:
        ctx.assert_local(token.task_range)
        st = ctx.local_state
        q = token.task_range.start // self.stride
        ql = q - st.first_block
        bi, bj = divmod(q, self.grid)
        bsz = self.blk

        st.arrived[ql] += 1
        remote = token.remote_range
        if not remote.empty:
            edge = ctx.staged(remote)
            parent_off = remote.start - (remote.start // self.stride) * self.stride
            if parent_off == 1:          # a south edge: my north input
                st.north_in[ql] = edge
            else:                        # an east edge: my west input
                st.west_in[ql] = edge

        expected = max((bi > 0) + (bj > 0), 1)
        if st.arrived[ql] < expected:
            ctx.charge(1)
            return

        r0 = bi * bsz
        c0 = bj * bsz
        if bi > 0:
            north = st.north_in[ql]
        else:
            north = (np.arange(c0, c0 + bsz + 1) * self.gap).astype(np.int32)
        if bj > 0:
            west = st.west_in[ql]
        else:
            west = (np.arange(r0, r0 + bsz + 1) * self.gap).astype(np.int32)

        h = hotloops.nw_block(self.a[r0:r0 + bsz], self.b[c0:c0 + bsz],
                              north, west,
                              self.match, self.mismatch, self.gap)
        ctx.charge(3 * bsz * bsz + 1)
        south = h[bsz, :].copy()
        east = h[:, bsz].copy()

        def commit(st=st, ql=ql, south=south, east=east):
            st.south_store[ql] = south
            st.east_store[ql] = east

        ctx.on_commit(commit)

        if bi < self.grid - 1:
            child = (q + self.grid) * self.stride
            sr = self._south_range(q)
            ctx.task_spawn(self.task_id, child, child + 1,
                           remote_start=sr.start, remote_end=sr.end)
        if bj < self.grid - 1:
            child = (q + 1) * self.stride
            er = self._east_range(q)
            ctx.task_spawn(self.task_id, child, child + 1,
                           remote_start=er.start, remote_end=er.end)

    def read_words(self, state: NWState, piece: AddressRange) -> np.ndarray:
        q = piece.start // self.stride
        ql = q - state.first_block
        off = piece.start - q * self.stride
        if off == 1 and len(piece) == self.blk + 1:
            return state.south_store[ql].copy()
        if off == self.blk + 2 and len(piece) == self.blk + 1:
            return state.east_store[ql].copy()
        raise ValueError(f"remote read {piece} is not a whole stored edge")

    def result(self, states) -> dict[str, np.ndarray]:
        parts = []
        for bj in range(self.grid):
            q = (self.grid - 1) * self.grid + bj
            st = states[q // self.nb]
            edge = st.south_store[q - st.first_block]
            parts.append(edge if bj == 0 else edge[1:])
        return {"last_row": np.concatenate(parts)}

    def oracle(self) -> dict[str, np.ndarray]:
        return {"last_row": nw_last_row(self.a, self.b, self.match,
                                        self.mismatch, self.gap)}
