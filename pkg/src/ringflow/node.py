"""One ring node: dispatcher, accelerator groups, spawn buffers, coalescer.

Each node iteration services the pipeline once, in fixed order: drain link
arrivals, process one receive-queue token (terminate handling or filter),
serve the wait-queue head (start a remote acquisition or launch), move
spawned tokens into the coalescer, release one coalesced token, and inject
one send-queue token onto the outgoing link. One filter, one launch and one
coalesced release per iteration is what gives the dispatcher its cycle
granularity.

Iterations are event-driven: a node only reschedules itself while it is
making progress or waiting on a known time (a link injection slot, a held
terminate retry). Anything else is woken by the event that unblocks it:
task completion, acquisition completion, a token delivery, or a downstream
queue draining.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from .addressing import AddressRange
from .cgra import (CostParams, GroupArray, SpawnController, execution_cycles,
                   groups_requested, is_long_spawn)
from .coalescer import CoalesceBuffer
from .dispatcher import Dispatcher, FilterOutcome, TerminationOutcome
from .registry import RegistrationError
from .tokens import TaskToken


class SimulationFault(RuntimeError):
    """A kernel broke the execution model (e.g. touched non-local data)."""


class KernelContext:
    """What a kernel is allowed to see and do while it executes.

    Kernels run functionally at launch time: they read committed state,
    charge their instrumented operation count, queue spawns, and register
    commit callbacks. Spawns are flushed and callbacks run at the
    completion event, so application state never shows a half-executed
    task.
    """

    __slots__ = ("node_id", "partition", "token", "local_state", "ledger",
                 "registry", "_staged", "ops", "spawns", "commits")

    def __init__(self, node: "Node", token: TaskToken,
                 staged: dict[AddressRange, Any]):
        self.node_id = node.node_id
        self.partition = node.partition
        self.token = token
        self.local_state = node.app_state
        self.ledger = node.sim.ledger
        self.registry = node.sim.registry
        self._staged = staged
        self.ops = 0
        self.spawns: list[TaskToken] = []
        self.commits: list[Callable[[], None]] = []

    def charge(self, ops: int) -> None:
        self.ops += int(ops)

    def task_spawn(self, task_id: int, start: int, end: int, param: int = 0,
                   remote_start: int = 0, remote_end: int = 0) -> None:
        if task_id not in self.registry:
            raise RegistrationError(f"spawn of unregistered task id {task_id}")
        if start >= end:
            raise ValueError(f"spawned task range [{start},{end}) is empty")
        self.spawns.append(TaskToken(
            task_id, self.node_id,
            AddressRange(start, end),
            AddressRange(remote_start, remote_end),
            param,
        ))

    def on_commit(self, fn: Callable[[], None]) -> None:
        self.commits.append(fn)

    def assert_local(self, rng: AddressRange) -> None:
        if not self.partition.covers(rng):
            raise SimulationFault(
                f"node {self.node_id} kernel touched {rng} outside its "
                f"partition {self.partition}"
            )

    def staged(self, rng: AddressRange):
        """Fetch remote data staged for this task; exact-range lookup."""
        arr = self._staged.get(rng)
        if arr is None:
            raise SimulationFault(
                f"node {self.node_id} kernel read remote range {rng} that was "
                f"never staged (token remote range {self.token.remote_range})"
            )
        return arr


@dataclass
class WaitSlot:
    token: TaskToken
    acquire_started: bool = False
    data_ready: bool = False
    staged: dict[AddressRange, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.token.remote_range.empty:
            self.data_ready = True


@dataclass
class RunningTask:
    token: TaskToken
    group_slots: tuple[int, ...]
    cycles: int
    ops: int
    spawns: list[TaskToken]
    commits: list[Callable[[], None]]


class Node:
    def __init__(self, node_id: int, sim, partition: AddressRange, app_state):
        cfg = sim.config
        self.node_id = node_id
        self.sim = sim
        self.partition = partition
        self.app_state = app_state
        self.disp = Dispatcher(
            node_id, partition,
            recv_capacity=cfg.recv_capacity,
            wait_capacity=cfg.wait_capacity,
            send_capacity=cfg.send_capacity,
        )
        self.groups = GroupArray(cfg.cgra_groups)
        self.controller = SpawnController(cfg.spawn_queues, cfg.spawn_queue_capacity)
        self.coalescer = CoalesceBuffer(cfg.coalesce_window, cfg.coalesce_drain)
        self.cost_params = CostParams(
            reconfig_cycles=cfg.reconfig_cycles,
            spawn_short_cycles=cfg.spawn_short_cycles,
            spawn_long_cycles=cfg.spawn_long_cycles,
            reconfig_every_launch=cfg.reconfig_every_launch,
        )
        self.executing: dict[int, RunningTask] = {}
        self._exec_seq = 0
        self.in_link = None    # wired by the simulator
        self.out_link = None
        self.wake_time: int | None = None
        self.quiet_since: int | None = None

    # -- state queries ----------------------------------------------------

    @property
    def halted(self) -> bool:
        return self.disp.halted

    def local_work_pending(self) -> bool:
        """Everything that must drain before a terminate may be forwarded
        (the wait queue is checked separately by the dispatcher)."""
        return bool(
            self.executing
            or self.controller.pending
            or self.coalescer.pending_count
            or self.disp.send
            or self.in_link.pending
        )

    def fully_quiet(self) -> bool:
        return not (self.disp.recv or self.disp.wait or self.local_work_pending())

    def anything_buffered(self) -> bool:
        return bool(
            self.disp.recv or self.disp.wait or self.disp.send
            or self.controller.pending or self.coalescer.pending_count
            or self.in_link.pending
        )

    # -- pipeline stages ---------------------------------------------------

    def _pump_arrivals(self) -> bool:
        moved = False
        link = self.in_link
        while link.pending:
            if not self.disp.arrive(link.pending[0]):
                self.sim.ledger.per_node[self.node_id].stall_cycles += 1
                break
            link.pending.popleft()
            moved = True
        if moved and link.capacity:
            self.sim.wake(link.src, self.sim.eq.now)   # backpressure released
        return moved

    def _recv_step(self) -> tuple[bool, bool]:
        """Process at most one receive-head token.

        Returns (progress, retry_on_timer): retry_on_timer asks for a
        next-cycle respin for held or send-blocked terminate tokens.
        """
        head = self.disp.recv.peek()
        if head is None:
            return False, False
        if head.is_terminate:
            outcome = self.disp.termination_step(self.local_work_pending())
            if outcome is TerminationOutcome.HELD:
                return True, True
            if outcome is TerminationOutcome.HALTED:
                self.sim.note_halt(self.node_id)
                return True, False
            if outcome is TerminationOutcome.FORWARDED:
                return True, False
            return False, True    # STALLED: no send space, retry next cycle
        outcome, plan = self.disp.filter_step(WaitSlot)
        if outcome is FilterOutcome.FILTERED:
            led = self.sim.ledger
            led.filter_operations += 1
            if plan.is_split:
                led.tokens_split_parents += 1
                led.tokens_split_children += (1 if plan.wait else 0) + len(plan.send)
            return True, False
        if outcome is FilterOutcome.STALLED:
            self.sim.ledger.per_node[self.node_id].stall_cycles += 1
        return False, False

    def _service_wait(self) -> bool:
        if not self.disp.wait:
            return False
        # The spawn backlog pauses wait-queue service so the coalescer can
        # catch up, but a full wait queue can only shrink by launching:
        # spawned tokens overflow to the unbounded store, released tokens
        # need recv space, recv needs wait space. Yielding here breaks
        # that cycle without unbounding anything.
        if self.controller.launch_inhibited and self.disp.wait.free > 0:
            return False
        scan = len(self.disp.wait) if self.sim.config.greedy_launch else 1
        progress = False
        for idx, slot in enumerate(self.disp.wait):
            if idx >= scan:
                break
            if not slot.acquire_started:
                slot.acquire_started = True
                if not slot.data_ready:
                    self.sim.start_acquire(self, slot)
                    progress = True
            if slot.data_ready and self._try_launch(idx, slot):
                return True
        return progress

    def _try_launch(self, idx: int, slot: WaitSlot) -> bool:
        token = slot.token
        requested = groups_requested(len(token.task_range), len(self.partition))
        granted = self.groups.try_allocate(requested)
        if granted is None:
            return False   # Busy: the slot keeps its place in line
        if idx == 0:
            self.disp.wait.pop()
        else:
            del self.disp.wait._items[idx]   # greedy launch bypasses the head
        self._launch(token, slot, granted)
        return True

    def _launch(self, token: TaskToken, slot: WaitSlot,
                granted: tuple[int, ...]) -> None:
        sim = self.sim
        spec = sim.registry.lookup(token.task_id)
        if sim.config.debug_checks:
            sim.record_execution_addresses(self.node_id, token)
        ctx = KernelContext(self, token, slot.staged)
        spec.fn(ctx, token)

        reconfig = self.groups.reconfigure_charge(granted, token.task_id,
                                                  self.cost_params)
        n_long = sum(1 for t in ctx.spawns if is_long_spawn(t))
        n_short = len(ctx.spawns) - n_long
        speedup = sim.speedup_for(spec, len(granted))
        cycles = execution_cycles(ctx.ops, speedup, reconfig, n_short, n_long,
                                  self.cost_params)

        seq = self._exec_seq
        self._exec_seq += 1
        self.executing[seq] = RunningTask(token, granted, cycles, ctx.ops,
                                          ctx.spawns, ctx.commits)
        self.disp.note_local_activity()
        sim.ledger.per_node[self.node_id].occupancy_change(
            sim.eq.now, self.groups.busy_count)
        sim.eq.schedule(sim.eq.now + cycles, sim.task_done, self.node_id, seq)

    def _coalesce_step(self) -> bool:
        intake = self.controller.drain_into(self.coalescer.add)
        merges, released = self.coalescer.step(self.disp.arrive)
        if merges:
            self.sim.ledger.tokens_coalesced += merges
        return bool(intake or merges or released)

    def _pump_send(self) -> bool:
        head = self.disp.send.peek()
        if head is None:
            return False
        link = self.out_link
        now = self.sim.eq.now
        if not link.can_inject(now):
            return False
        self.disp.send.pop()
        self.sim.transmit(link, head, now)
        return True

    # -- the loop iteration -------------------------------------------------

    def iterate(self) -> None:
        sim = self.sim
        now = sim.eq.now

        if self.halted:
            # Two duties remain: flush the terminate this node forwarded at
            # halt, and pass arriving terminates straight through so the
            # sentinel can keep circulating until every node has halted.
            link = self.in_link
            while link.pending:
                tok = link.pending[0]
                if not tok.is_terminate:
                    raise SimulationFault(
                        f"node {self.node_id} halted but received work token "
                        f"{tok}; termination was unsafe")
                if not self.disp.send.try_push(tok):
                    break
                link.pending.popleft()
            if self.disp.send:
                if not self._pump_send() or self.disp.send:
                    sim.wake(self.node_id, max(now + 1, self.out_link.next_inject))
            return

        progress = self._pump_arrivals()
        recv_progress, retry_on_timer = self._recv_step()
        progress |= recv_progress
        if not self.halted:
            progress |= self._service_wait()
            progress |= self._coalesce_step()
            progress |= self._pump_send()
            self._update_quiet(now)

        if self.halted:
            if self.disp.send:
                sim.wake(self.node_id, now + 1)
            return

        if not self.anything_buffered():
            return
        if progress:
            delay = sim.config.iteration_cycles
            if retry_on_timer:
                delay = max(1, delay)
            sim.wake(self.node_id, now + delay)
        elif retry_on_timer:
            sim.wake(self.node_id, now + max(1, sim.config.iteration_cycles))
        elif self.disp.send and not self.out_link.can_inject(now) \
                and now < self.out_link.next_inject:
            sim.wake(self.node_id, self.out_link.next_inject)
        # otherwise: blocked on groups, data, or a downstream queue; the
        # unblocking event wakes this node

    def _update_quiet(self, now: int) -> None:
        if self.node_id != 0 or self.sim.terminate_sent:
            return
        if self.fully_quiet():
            if self.quiet_since is None:
                self.quiet_since = now
                self.sim.schedule_inject_check(now)
        else:
            self.quiet_since = None
