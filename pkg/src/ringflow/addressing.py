"""Half-open address ranges and the overlap algebra used by token filtering.

Addresses are abstract word indices (a word is 4 bytes). All ranges are
half-open [start, end) and must fit in 32 bits so they can ride inside a
token's wire format.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, auto

ADDR_MAX = 2**32 - 1
WORD_BYTES = 4


class RangeError(ValueError):
    """Malformed range or an overlap query that has no defined answer."""


class RangeRelation(Enum):
    """How a task's address range relates to a node's owned range."""

    DISJOINT = auto()
    SUBSET = auto()
    SUPERSET = auto()
    PARTIAL_OVERLAP = auto()


@dataclass(frozen=True, order=True)
class AddressRange:
    """Half-open interval [start, end) of word addresses."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if not (0 <= self.start <= ADDR_MAX + 1 and 0 <= self.end <= ADDR_MAX + 1):
            raise RangeError(f"range bounds outside 32-bit space: [{self.start}, {self.end})")
        if self.start > self.end:
            raise RangeError(f"range start after end: [{self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start

    def __bool__(self) -> bool:
        return self.end > self.start

    @property
    def empty(self) -> bool:
        return self.start == self.end

    def contains(self, addr: int) -> bool:
        return self.start <= addr < self.end

    def covers(self, other: AddressRange) -> bool:
        return self.start <= other.start and other.end <= self.end

    def intersection(self, other: AddressRange) -> AddressRange:
        lo = max(self.start, other.start)
        hi = min(self.end, other.end)
        if lo >= hi:
            return EMPTY_RANGE
        return AddressRange(lo, hi)

    def __str__(self) -> str:
        return f"[{self.start},{self.end})"


EMPTY_RANGE = AddressRange(0, 0)


def range_relation(task: AddressRange, local: AddressRange) -> RangeRelation:
    """Classify a task range against a node's owned range.

    A task range equal to the local range counts as SUBSET (it executes in
    place); SUPERSET requires strict containment on at least one side.
    Empty task or local ranges cannot be classified.
    """
    if task.empty:
        raise RangeError(f"cannot classify empty task range {task}")
    if local.empty:
        raise RangeError(f"cannot classify against empty local range {local}")
    if task.end <= local.start or local.end <= task.start:
        return RangeRelation.DISJOINT
    if local.start <= task.start and task.end <= local.end:
        return RangeRelation.SUBSET
    if task.start <= local.start and local.end <= task.end:
        return RangeRelation.SUPERSET
    return RangeRelation.PARTIAL_OVERLAP
