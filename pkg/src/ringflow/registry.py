"""Task registry: maps 4-bit task ids to kernel descriptors.

Ids are a per-scenario namespace handed out in registration order (0..14).
Id 15 is the terminate sentinel and can never be registered.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .tokens import MAX_TASK_ID, TERMINATE_TASK_ID


class RegistrationError(ValueError):
    """Unknown task id, duplicate name, or exhausted id space."""


@dataclass(frozen=True)
class KernelSpec:
    task_id: int
    name: str
    fn: Callable          # fn(ctx, token) -> None; side effects go through ctx
    speedups: dict[int, float]   # granted group count -> speedup factor
    is_root: bool = False


class TaskRegistry:
    def __init__(self) -> None:
        self._by_id: dict[int, KernelSpec] = {}
        self._by_name: dict[str, KernelSpec] = {}

    def task_register(
        self,
        name: str,
        fn: Callable,
        speedups: tuple[float, float, float] = (1.0, 1.0, 1.0),
        is_root: bool = False,
    ) -> int:
        """Register a kernel; returns its assigned 4-bit task id."""
        if name in self._by_name:
            raise RegistrationError(f"kernel {name!r} already registered")
        task_id = len(self._by_id)
        if task_id > MAX_TASK_ID:
            raise RegistrationError(
                f"task id space exhausted ({MAX_TASK_ID + 1} kernels max, "
                f"{TERMINATE_TASK_ID} is reserved)"
            )
        s1, s2, s4 = speedups
        spec = KernelSpec(task_id, name, fn, {1: s1, 2: s2, 4: s4}, is_root)
        self._by_id[task_id] = spec
        self._by_name[name] = spec
        return task_id

    def lookup(self, task_id: int) -> KernelSpec:
        spec = self._by_id.get(task_id)
        if spec is None:
            raise RegistrationError(f"no kernel registered for task id {task_id}")
        return spec

    def by_name(self, name: str) -> KernelSpec:
        spec = self._by_name.get(name)
        if spec is None:
            raise RegistrationError(f"no kernel registered under name {name!r}")
        return spec

    def __contains__(self, task_id: int) -> bool:
        return task_id in self._by_id

    def __len__(self) -> int:
        return len(self._by_id)

    def specs(self) -> list[KernelSpec]:
        return [self._by_id[i] for i in sorted(self._by_id)]
