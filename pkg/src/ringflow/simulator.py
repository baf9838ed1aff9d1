"""Whole-ring simulation: wiring, event dispatch, termination, results.

Determinism contract: the only ordering authority is the event queue's
(time, insertion-seq) pair, and the only randomness is the numpy generator
seeded from the scenario config. Two runs of the same config produce
byte-identical ledgers and results.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .config import ScenarioConfig
from .events import EventQueue
from .metrics import MetricsLedger, digest_parts
from .network import DataNetwork, PartitionDirectory, RingLink, data_distance
from .node import Node, SimulationFault, WaitSlot
from .registry import KernelSpec, TaskRegistry
from .tokens import TOKEN_BYTES, TaskToken, make_terminate


class SimulationError(RuntimeError):
    """The simulation wedged or broke an internal invariant."""


@dataclass
class RunResult:
    config: ScenarioConfig
    ledger: MetricsLedger
    result: dict[str, np.ndarray]
    digest: str
    halt_times: list[int]


class Simulator:
    def __init__(self, config: ScenarioConfig, app):
        config.validate()
        self.config = config
        self.app = app
        self.rng = np.random.default_rng(config.seed ^ 0x5EED)
        self.eq = EventQueue()
        self.registry = TaskRegistry()
        app.register(self.registry)

        n = config.nodes
        partitions = app.partitions(n)
        self.directory = PartitionDirectory(partitions)
        self.ledger = MetricsLedger(nodes=n, groups=config.cgra_groups)
        self.ledger.padded_size = getattr(app, "padded", 0)

        self.node_states = [app.node_state(i, partitions[i]) for i in range(n)]
        self.nodes = [Node(i, self, partitions[i], self.node_states[i])
                      for i in range(n)]

        inject_interval = config.serialization_cycles(TOKEN_BYTES)
        self.links = [
            RingLink(i, (i + 1) % n, config.hop_cycles, inject_interval,
                     config.link_capacity)
            for i in range(n)
        ]
        for i, node in enumerate(self.nodes):
            node.out_link = self.links[i]
            node.in_link = self.links[(i - 1) % n]
        for link in self.links:
            link.inflight_tokens = []

        self.datanet = DataNetwork(
            self.directory, n, config.hop_cycles,
            config.bytes_per_cycle, app.bytes_per_address,
        )

        self.terminate_sent = False
        self.all_halted = False
        self.halt_times: list[int] = [-1] * n
        self._halted_count = 0
        self._exec_addr: dict[int, int] = {}

    # -- scheduling ---------------------------------------------------------

    def wake(self, node_id: int, t: int) -> None:
        node = self.nodes[node_id]
        if node.wake_time is not None and node.wake_time <= t:
            return
        node.wake_time = t
        self.eq.schedule(t, self._iter_event, node_id)

    def _iter_event(self, node_id: int) -> None:
        node = self.nodes[node_id]
        if node.wake_time != self.eq.now:
            return   # superseded by an earlier wake
        node.wake_time = None
        node.iterate()

    # -- ring traffic ---------------------------------------------------------

    def transmit(self, link: RingLink, token: TaskToken, now: int) -> None:
        jitter = 0
        if self.config.latency_jitter > 0.0:
            u = self.rng.uniform(-self.config.latency_jitter,
                                 self.config.latency_jitter)
            jitter = int(round(link.hop_cycles * u))
        delivery = link.inject(token, now, jitter)
        link.inflight_tokens.append(token)
        led = self.ledger
        led.bytes_task_movement += TOKEN_BYTES
        if token.is_terminate:
            led.terminate_hops += 1
        else:
            led.tokens_forwarded += 1
        self.eq.schedule(delivery, self._deliver, link.src, token)

    def _deliver(self, link_src: int, token: TaskToken) -> None:
        link = self.links[link_src]
        link.inflight_tokens.remove(token)
        link.deliver(token)
        self.wake(link.dst, self.eq.now)

    # -- remote data ----------------------------------------------------------

    def start_acquire(self, node: Node, slot: WaitSlot) -> None:
        now = self.eq.now
        done, pieces, charged = self.datanet.plan(
            node.node_id, slot.token.remote_range, now)
        led = self.ledger
        led.bytes_essential += charged
        led.acquire_transfers += sum(
            1 for owner, _ in pieces
            if data_distance(node.node_id, owner, self.config.nodes) != 0
        )
        self.eq.schedule(done, self._acquire_done, node.node_id, slot, pieces)

    def _acquire_done(self, node_id: int, slot: WaitSlot, pieces) -> None:
        parts = [
            self.app.read_words(self.node_states[owner], piece)
            for owner, piece in pieces
        ]
        whole = parts[0] if len(parts) == 1 else np.concatenate(parts)
        slot.staged[slot.token.remote_range] = whole
        slot.data_ready = True
        self.wake(node_id, self.eq.now)

    # -- task completion --------------------------------------------------------

    def task_done(self, node_id: int, seq: int) -> None:
        node = self.nodes[node_id]
        task = node.executing.pop(seq)
        node.groups.release(task.group_slots)
        led = self.ledger
        led.per_node[node_id].occupancy_change(self.eq.now, node.groups.busy_count)
        for fn in task.commits:
            fn()
        for tok in task.spawns:
            node.controller.absorb(tok)
        if task.spawns:
            node.disp.note_local_activity()
        led.tokens_spawned += len(task.spawns)
        led.tokens_executed += 1
        led.executed_cycles += task.cycles
        led.executed_ops += task.ops
        self.wake(node_id, self.eq.now)

    def speedup_for(self, spec: KernelSpec, granted: int) -> float:
        if self.config.accel == "cpu":
            return 1.0
        override = getattr(self.config, f"speedup_{granted}")
        if override > 0:
            return override
        return spec.speedups[granted]

    # -- termination ------------------------------------------------------------

    def schedule_inject_check(self, quiet_start: int) -> None:
        self.eq.schedule(quiet_start + self.config.quiet_cycles,
                         self._inject_check)

    def _inject_check(self) -> None:
        if self.terminate_sent:
            return
        node0 = self.nodes[0]
        if node0.quiet_since is None or not node0.fully_quiet():
            return   # activity resumed; a fresh quiet period reschedules
        if self.eq.now < node0.quiet_since + self.config.quiet_cycles:
            self.eq.schedule(node0.quiet_since + self.config.quiet_cycles,
                             self._inject_check)
            return
        tok = make_terminate(0)
        assert node0.disp.arrive(tok)
        self.terminate_sent = True
        self.ledger.terminate_injected += 1
        self.wake(0, self.eq.now)

    def note_halt(self, node_id: int) -> None:
        self.halt_times[node_id] = self.eq.now
        self._halted_count += 1
        if self.config.debug_checks and self.work_exists():
            raise SimulationFault(
                f"node {node_id} halted at {self.eq.now} while executable "
                f"work still exists: {self._dump_state()}"
            )
        if self._halted_count == self.config.nodes:
            self.all_halted = True

    # -- debug introspection ------------------------------------------------------

    def work_exists(self) -> bool:
        for node in self.nodes:
            if node.executing or node.controller.pending \
                    or node.coalescer.pending_count or node.disp.wait:
                return True
            for q in (node.disp.recv, node.disp.send):
                if any(not t.is_terminate for t in q):
                    return True
        for link in self.links:
            if any(not t.is_terminate for t in link.pending):
                return True
            if any(not t.is_terminate for t in link.inflight_tokens):
                return True
        return False

    def record_execution_addresses(self, node_id: int, token: TaskToken) -> None:
        for addr in range(token.task_range.start, token.task_range.end):
            prev = self._exec_addr.setdefault(addr, node_id)
            if prev != node_id:
                raise SimulationFault(
                    f"address {addr} executed by node {node_id} after node {prev}"
                )

    def _dump_state(self) -> str:
        lines = []
        for node in self.nodes:
            lines.append(
                f"node{node.node_id}: recv={len(node.disp.recv)} "
                f"wait={len(node.disp.wait)} send={len(node.disp.send)} "
                f"exec={len(node.executing)} spawnbuf={node.controller.pending} "
                f"coalesce={node.coalescer.pending_count} "
                f"link_pend={len(node.in_link.pending)} halted={node.halted}"
            )
        return "; ".join(lines)

    # -- run --------------------------------------------------------------------

    def run(self) -> RunResult:
        for tok in self.app.root_tokens():
            owner = self.directory.owner_of(tok.task_range.start)
            if not self.nodes[owner].disp.arrive(tok):
                raise SimulationError("root token does not fit in the receive queue")
            self.ledger.tokens_root += 1
            self.wake(owner, 0)
        if not self.app.root_tokens():
            raise SimulationError("application injected no root tokens")

        while not self.all_halted:
            if not self.eq.step():
                raise SimulationError(
                    f"event queue drained before all nodes halted: {self._dump_state()}"
                )

        led = self.ledger
        led.total_cycles = self.eq.now
        led.terminate_retired = led.terminate_injected
        for nm in led.per_node:
            nm.finish(led.total_cycles)
        led.check_cycle_identity()
        led.check_conservation()

        result = self.app.result(self.node_states)
        digest = run_digest(led, result)
        return RunResult(self.config, led, result, digest, list(self.halt_times))


def run_digest(ledger: MetricsLedger, result: dict[str, np.ndarray]) -> str:
    parts = [ledger.canonical_bytes()]
    for key in sorted(result):
        arr = np.ascontiguousarray(result[key])
        parts.append(key.encode())
        parts.append(str(arr.dtype).encode())
        parts.append(str(arr.shape).encode())
        parts.append(arr.tobytes())
    return digest_parts(*parts)
