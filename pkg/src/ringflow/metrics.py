"""Run accounting: cycles, byte movement by category, token lifecycle counters.

Token conservation is bookkept as "created" versus "retired":

    created  = root injections + kernel spawns + net split gain + terminates
    retired  = executed + merged away + terminates retired

A split of one token into k children retires the parent and creates k
children, so its net contribution to "created" is k - 1. With that reading,
created == executed + merged_away + terminate_retired holds exactly at the
end of every run, and check_conservation() enforces it.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field


@dataclass
class NodeMetrics:
    node_id: int
    groups: int
    busy_cycles: int = 0          # wall cycles with >= 1 group occupied
    stall_cycles: int = 0         # cycles a full queue refused a transfer
    occupancy_cycles: list[int] = field(default_factory=list)  # index = groups busy
    _occ_level: int = 0
    _occ_since: int = 0
    _busy_since: int = -1

    def __post_init__(self) -> None:
        if not self.occupancy_cycles:
            self.occupancy_cycles = [0] * (self.groups + 1)

    def occupancy_change(self, now: int, new_level: int) -> None:
        self.occupancy_cycles[self._occ_level] += now - self._occ_since
        if self._occ_level == 0 and new_level > 0:
            self._busy_since = now
        elif self._occ_level > 0 and new_level == 0:
            self.busy_cycles += now - self._busy_since
            self._busy_since = -1
        self._occ_level = new_level
        self._occ_since = now

    def finish(self, now: int) -> None:
        self.occupancy_change(now, self._occ_level)


@dataclass
class MetricsLedger:
    nodes: int
    groups: int
    total_cycles: int = 0
    per_node: list[NodeMetrics] = field(default_factory=list)

    # byte movement by category
    bytes_task_movement: int = 0
    bytes_essential: int = 0
    bytes_nonessential: int = 0

    # token lifecycle
    tokens_root: int = 0
    tokens_spawned: int = 0
    tokens_split_parents: int = 0
    tokens_split_children: int = 0
    tokens_coalesced: int = 0     # merge operations; each retires one token
    tokens_forwarded: int = 0     # work-token link hops
    tokens_executed: int = 0
    terminate_injected: int = 0
    terminate_retired: int = 0
    terminate_hops: int = 0

    # work accounting
    executed_cycles: int = 0      # sum of charged task execution cycles
    executed_ops: int = 0         # sum of instrumented kernel operations
    duplicate_relaxations: int = 0
    filter_operations: int = 0
    acquire_transfers: int = 0
    padded_size: int = 0

    def __post_init__(self) -> None:
        if not self.per_node:
            self.per_node = [NodeMetrics(i, self.groups) for i in range(self.nodes)]

    @property
    def tokens_created(self) -> int:
        split_gain = self.tokens_split_children - self.tokens_split_parents
        return self.tokens_root + self.tokens_spawned + split_gain + self.terminate_injected

    @property
    def bytes_total(self) -> int:
        return self.bytes_task_movement + self.bytes_essential + self.bytes_nonessential

    def check_conservation(self) -> None:
        lhs = self.tokens_created
        rhs = self.tokens_executed + self.tokens_coalesced + self.terminate_retired
        if lhs != rhs:
            raise AssertionError(
                f"token conservation broken: created {lhs} != "
                f"executed {self.tokens_executed} + merged {self.tokens_coalesced} "
                f"+ terminate retired {self.terminate_retired}"
            )

    def check_cycle_identity(self) -> None:
        for nm in self.per_node:
            occ = sum(nm.occupancy_cycles)
            if occ != self.total_cycles:
                raise AssertionError(
                    f"node {nm.node_id}: occupancy histogram covers {occ} cycles, "
                    f"run lasted {self.total_cycles}"
                )
            idle = self.total_cycles - nm.busy_cycles
            if idle < 0:
                raise AssertionError(f"node {nm.node_id}: busy {nm.busy_cycles} exceeds total")

    def idle_cycles(self, node_id: int) -> int:
        return self.total_cycles - self.per_node[node_id].busy_cycles

    def to_dict(self) -> dict:
        d = {
            k: v
            for k, v in self.__dict__.items()
            if k != "per_node" and not k.startswith("_")
        }
        d["tokens_created"] = self.tokens_created
        d["bytes_total"] = self.bytes_total
        d["per_node"] = [
            {
                "node_id": nm.node_id,
                "busy_cycles": nm.busy_cycles,
                "idle_cycles": self.total_cycles - nm.busy_cycles,
                "stall_cycles": nm.stall_cycles,
                "occupancy_cycles": list(nm.occupancy_cycles),
            }
            for nm in self.per_node
        ]
        return d

    def canonical_bytes(self) -> bytes:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")).encode()


def digest_parts(*parts: bytes) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(len(p).to_bytes(8, "little"))
        h.update(p)
    return h.hexdigest()
