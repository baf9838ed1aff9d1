"""Bounded FIFO queues used for every hardware buffer in the model."""

from __future__ import annotations

from collections import deque
from typing import Any, Iterator


class BoundedQueue:
    """FIFO with a fixed capacity; capacity None means unbounded.

    try_push returns False instead of raising when full, because a full
    queue is ordinary backpressure, not an error.
    """

    __slots__ = ("capacity", "_items")

    def __init__(self, capacity: int | None):
        if capacity is not None and capacity < 1:
            raise ValueError(f"queue capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._items: deque[Any] = deque()

    def try_push(self, item: Any) -> bool:
        if self.capacity is not None and len(self._items) >= self.capacity:
            return False
        self._items.append(item)
        return True

    def pop(self) -> Any:
        return self._items.popleft()

    def peek(self) -> Any | None:
        return self._items[0] if self._items else None

    @property
    def free(self) -> int:
        if self.capacity is None:
            return 2**31
        return self.capacity - len(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __bool__(self) -> bool:
        return bool(self._items)

    def __iter__(self) -> Iterator[Any]:
        return iter(self._items)
