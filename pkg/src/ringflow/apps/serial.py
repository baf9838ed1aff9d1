"""Single-worklist replay of an application, for calibration.

Executes the same kernels against a fresh copy of the same inputs with
a plain FIFO worklist: no ring, no queues, no timing. Alongside the
result it reproduces the charged-cycle arithmetic for a fully
serialized one-group schedule, which the calibration tests compare
against a simulated run with zero latencies. Only kernels whose op
counts do not depend on execution interleaving can be compared exactly;
the relaxation kernel executes duplicates whose count is
schedule-dependent.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from ..addressing import AddressRange, range_relation, RangeRelation
from ..cgra import CostParams, execution_cycles, is_long_spawn
from ..config import ScenarioConfig
from ..dispatcher import split_token
from ..metrics import MetricsLedger
from ..network import PartitionDirectory
from ..registry import RegistrationError, TaskRegistry
from ..tokens import TaskToken


@dataclass
class SerialStats:
    tasks: int
    ops: int
    cycles: int
    result: dict[str, np.ndarray]


class SerialCtx:
    """Stand-in for the runtime kernel context with immediate effects."""

    def __init__(self, app, node_id: int, partition: AddressRange,
                 state, states, directory: PartitionDirectory,
                 registry: TaskRegistry, ledger: MetricsLedger):
        self.app = app
        self.node_id = node_id
        self.partition = partition
        self.local_state = state
        self._states = states
        self._directory = directory
        self.registry = registry
        self.ledger = ledger
        self.ops = 0
        self.spawns: list[TaskToken] = []
        self.commits: list[Callable[[], None]] = []

    def charge(self, ops: int) -> None:
        self.ops += int(ops)

    def task_spawn(self, task_id: int, start: int, end: int, param: int = 0,
                   remote_start: int = 0, remote_end: int = 0) -> None:
        if task_id not in self.registry:
            raise RegistrationError(f"spawn of unregistered task id {task_id}")
        self.spawns.append(TaskToken(
            task_id, self.node_id, AddressRange(start, end),
            AddressRange(remote_start, remote_end), param))

    def on_commit(self, fn: Callable[[], None]) -> None:
        self.commits.append(fn)

    def assert_local(self, rng: AddressRange) -> None:
        if not self.partition.covers(rng):
            raise AssertionError(
                f"serial replay routed {rng} to the wrong node")

    def staged(self, rng: AddressRange) -> Any:
        parts = []
        for owner, part in self._directory.split(rng):
            parts.append(self.app.read_words(self._states[owner], part))
        return parts[0] if len(parts) == 1 else np.concatenate(parts)


def serial_replay(config: ScenarioConfig, make_app: Callable) -> SerialStats:
    app = make_app(config)
    registry = TaskRegistry()
    app.register(registry)
    partitions = app.partitions(config.nodes)
    directory = PartitionDirectory(partitions)
    states = [app.node_state(i, partitions[i]) for i in range(config.nodes)]
    ledger = MetricsLedger(nodes=config.nodes, groups=1)
    params = CostParams(config.reconfig_cycles, config.spawn_short_cycles,
                        config.spawn_long_cycles, config.reconfig_every_launch)

    work = deque(app.root_tokens())
    last_config: dict[int, int] = {}
    tasks = ops = cycles = 0

    while work:
        token = work.popleft()
        owner = directory.owner_of(token.task_range.start)
        rel = range_relation(token.task_range, partitions[owner])
        if rel is not RangeRelation.SUBSET:
            plan = split_token(token, partitions[owner])
            work.extend(plan.send)
            token = plan.wait
            if token is None:
                continue

        spec = registry.lookup(token.task_id)
        ctx = SerialCtx(app, owner, partitions[owner], states[owner],
                        states, directory, registry, ledger)
        spec.fn(ctx, token)
        for fn in ctx.commits:
            fn()
        work.extend(ctx.spawns)

        if config.accel == "cpu":
            speedup = 1.0
        elif config.speedup_1 > 0:
            speedup = config.speedup_1
        else:
            speedup = spec.speedups[1]
        if params.reconfig_every_launch or last_config.get(owner) != token.task_id:
            reconfig = params.reconfig_cycles
            last_config[owner] = token.task_id
        else:
            reconfig = 0
        n_long = sum(1 for t in ctx.spawns if is_long_spawn(t))
        cycles += execution_cycles(ctx.ops, speedup, reconfig,
                                   len(ctx.spawns) - n_long, n_long, params)
        ops += ctx.ops
        tasks += 1

    return SerialStats(tasks, ops, cycles, app.result(states))
