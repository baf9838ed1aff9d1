"""Deterministic discrete-event core.

Events are totally ordered by (time, insertion sequence); payloads are never
compared, so two events at the same timestamp always fire in the order they
were scheduled. That single rule is what makes whole-simulation determinism
cheap to guarantee.
"""

from __future__ import annotations

import heapq
from typing import Any, Callable


class EventQueue:
    __slots__ = ("_heap", "_seq", "now")

    def __init__(self) -> None:
        self._heap: list[tuple[int, int, Callable[..., None], tuple[Any, ...]]] = []
        self._seq = 0
        self.now = 0

    def schedule(self, time: int, fn: Callable[..., None], *args: Any) -> None:
        if time < self.now:
            raise ValueError(f"cannot schedule at {time}, clock is already at {self.now}")
        heapq.heappush(self._heap, (time, self._seq, fn, args))
        self._seq += 1

    def step(self) -> bool:
        """Pop and run one event. Returns False when no events remain."""
        if not self._heap:
            return False
        time, _, fn, args = heapq.heappop(self._heap)
        self.now = time
        fn(*args)
        return True

    def __len__(self) -> int:
        return len(self._heap)
