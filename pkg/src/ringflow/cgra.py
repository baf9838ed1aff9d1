"""Reconfigurable-array execution model: group slots, allocation, cycle costs.

A node's array is carved into group slots (four by default). A task asks for
1, 2 or 4 groups depending on how much of the node's data range it touches,
degrades its request along 4 -> 2 -> 1 when slots are scarce, and reports
Busy only when nothing is free. Execution cost is the instrumented serial
operation count divided by the granted group count's speedup, plus a flat
reconfiguration charge when the slots' cached configuration does not match,
plus per-spawn charges accumulated by the kernel.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .tokens import TaskToken

QUARTER = 0.25
HALF = 0.5


def groups_requested(task_len: int, local_len: int) -> int:
    """Group demand from the fraction of the owned range a task touches.

    Under a quarter of the local range asks for one group, over half asks
    for four; the middle band (boundaries included) asks for two.
    """
    if local_len <= 0:
        raise ValueError(f"local range length must be positive, got {local_len}")
    if task_len <= 0:
        raise ValueError(f"task range length must be positive, got {task_len}")
    frac = task_len / local_len
    if frac < QUARTER:
        return 1
    if frac > HALF:
        return 4
    return 2


@dataclass
class CostParams:
    reconfig_cycles: int = 8
    spawn_short_cycles: int = 1
    spawn_long_cycles: int = 2
    reconfig_every_launch: bool = False


class GroupArray:
    """Group slots plus per-slot configuration cache."""

    def __init__(self, total_groups: int):
        if total_groups < 1:
            raise ValueError("need at least one group slot")
        self.total = total_groups
        self.free: list[int] = list(range(total_groups))   # ascending slot ids
        self.config_cache: list[int | None] = [None] * total_groups

    @property
    def free_count(self) -> int:
        return len(self.free)

    @property
    def busy_count(self) -> int:
        return self.total - len(self.free)

    def try_allocate(self, requested: int) -> tuple[int, ...] | None:
        """Grant the largest of {requested, requested/2, ...} that fits.

        Returns the granted slot ids (lowest-index first) or None when no
        slot is free (Busy).
        """
        if requested not in (1, 2, 4):
            raise ValueError(f"group requests must be 1, 2 or 4, got {requested}")
        if not self.free:
            return None
        grant = requested
        while grant > len(self.free):
            grant //= 2
        slots = tuple(self.free[:grant])
        del self.free[:grant]
        return slots

    def release(self, slots: tuple[int, ...]) -> None:
        for s in slots:
            if s in self.free:
                raise AssertionError(f"double release of group slot {s}")
        self.free.extend(slots)
        self.free.sort()

    def reconfigure_charge(self, slots: tuple[int, ...], task_id: int,
                           params: CostParams) -> int:
        """Flat reconfiguration cost; stamps the slots' config cache."""
        needed = params.reconfig_every_launch or any(
            self.config_cache[s] != task_id for s in slots
        )
        for s in slots:
            self.config_cache[s] = task_id
        return params.reconfig_cycles if needed else 0


def execution_cycles(serial_ops: int, speedup: float, reconfig: int,
                     n_short_spawns: int, n_long_spawns: int,
                     params: CostParams) -> int:
    """Charged cycles for one task execution."""
    if serial_ops < 0:
        raise ValueError("negative op count")
    compute = math.ceil(serial_ops / speedup) if serial_ops else 0
    return (compute + reconfig
            + n_short_spawns * params.spawn_short_cycles
            + n_long_spawns * params.spawn_long_cycles)


def is_long_spawn(token: TaskToken) -> bool:
    """A spawn costs two cycles when it carries a param or a remote range."""
    return token.param != 0 or not token.remote_range.empty


class SpawnController:
    """Hardware spawn buffers: a few small queues plus an overflow store.

    While the overflow store is non-empty or every hardware queue is full,
    the controller raises launch-inhibit so the runtime stops launching new
    tasks until the coalescer drains the backlog.
    """

    def __init__(self, n_queues: int = 4, queue_capacity: int = 4):
        self.queues: list[deque[TaskToken]] = [deque() for _ in range(n_queues)]
        self.queue_capacity = queue_capacity
        self.overflow: deque[TaskToken] = deque()

    def absorb(self, token: TaskToken) -> None:
        for q in self.queues:
            if len(q) < self.queue_capacity:
                q.append(token)
                return
        self.overflow.append(token)

    @property
    def launch_inhibited(self) -> bool:
        if self.overflow:
            return True
        return all(len(q) >= self.queue_capacity for q in self.queues)

    @property
    def pending(self) -> int:
        return sum(len(q) for q in self.queues) + len(self.overflow)

    def drain_into(self, accept) -> int:
        """Move buffered tokens out, oldest hardware queue first.

        accept(token) returns False to refuse (downstream window full);
        refusal stops the drain to preserve FIFO order. Overflow refills
        the hardware queues as they empty.
        """
        moved = 0
        for q in self.queues:
            while q:
                if not accept(q[0]):
                    self._refill()
                    return moved
                q.popleft()
                moved += 1
        self._refill()
        return moved

    def _refill(self) -> None:
        for q in self.queues:
            while self.overflow and len(q) < self.queue_capacity:
                q.append(self.overflow.popleft())
