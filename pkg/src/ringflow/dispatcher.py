"""Per-node token staging: receive, filter against owned range, forward.

The filter decides, for each incoming token, which part of its task range is
local (to the wait queue) and which parts must keep riding the ring (to the
send queue). split_token is the pure decision function; Dispatcher applies
it with queue-capacity atomicity: a split either places all of its pieces or
leaves the token at the head of the receive queue.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, auto

from .addressing import AddressRange, RangeRelation, range_relation
from .queues import BoundedQueue
from .tokens import TaskToken


@dataclass(frozen=True)
class FilterPlan:
    """What the filter wants to do with one token."""

    relation: RangeRelation
    wait: TaskToken | None
    send: tuple[TaskToken, ...]

    @property
    def is_split(self) -> bool:
        count = (1 if self.wait else 0) + len(self.send)
        return count > 1


def split_token(token: TaskToken, local: AddressRange) -> FilterPlan:
    """Classify and split a work token against the locally owned range.

    Children inherit every field of the parent except task_range. Empty
    children are dropped, so the emitted ranges partition the original
    task range exactly.
    """
    rel = range_relation(token.task_range, local)
    if rel is RangeRelation.DISJOINT:
        return FilterPlan(rel, None, (token,))
    if rel is RangeRelation.SUBSET:
        return FilterPlan(rel, token, ())
    t = token.task_range
    inner = t.intersection(local)
    send = []
    if t.start < inner.start:
        send.append(token.with_task_range(AddressRange(t.start, inner.start)))
    if inner.end < t.end:
        send.append(token.with_task_range(AddressRange(inner.end, t.end)))
    return FilterPlan(rel, token.with_task_range(inner), tuple(send))


class FilterOutcome(Enum):
    IDLE = auto()          # nothing in the receive queue
    FILTERED = auto()      # one token classified and placed
    STALLED = auto()       # head could not be placed atomically
    TERMINATE_HEAD = auto()  # head is a terminate token; not this step's job


class TerminationOutcome(Enum):
    NOT_TERMINATE = auto()
    HELD = auto()          # local work pending; token requeued at the tail
    FORWARDED = auto()     # first quiet receipt; armed
    HALTED = auto()        # second consecutive quiet receipt
    STALLED = auto()       # send queue full; retry next cycle


@dataclass
class Dispatcher:
    node_id: int
    local_range: AddressRange
    recv: BoundedQueue = field(init=False)
    wait: BoundedQueue = field(init=False)
    send: BoundedQueue = field(init=False)
    recv_capacity: int = 8
    wait_capacity: int = 8
    send_capacity: int = 8
    terminate_armed: bool = False
    halted: bool = False

    def __post_init__(self) -> None:
        self.recv = BoundedQueue(self.recv_capacity)
        self.wait = BoundedQueue(self.wait_capacity)
        self.send = BoundedQueue(self.send_capacity)

    # receive side -------------------------------------------------------

    def arrive(self, token: TaskToken) -> bool:
        """Accept a token from the ring or the local coalescer."""
        return self.recv.try_push(token)

    # filtering ----------------------------------------------------------

    def filter_step(self, wrap_wait) -> tuple[FilterOutcome, FilterPlan | None]:
        """Process at most one ordinary token from the receive head.

        wrap_wait(token) builds the wait-queue entry (the runtime wraps
        tokens with launch bookkeeping). Placement is atomic: if the wait
        queue or send queue cannot take every piece, the head stays put.
        """
        head = self.recv.peek()
        if head is None:
            return FilterOutcome.IDLE, None
        if head.is_terminate:
            return FilterOutcome.TERMINATE_HEAD, None

        plan = split_token(head, self.local_range)
        need_send = len(plan.send)
        need_wait = 1 if plan.wait is not None else 0
        if self.send.free < need_send or (need_wait and self.wait.free < 1):
            return FilterOutcome.STALLED, plan

        self.recv.pop()
        self.terminate_armed = False   # any non-terminate token disarms
        if plan.wait is not None:
            assert self.wait.try_push(wrap_wait(plan.wait))
        for child in plan.send:
            assert self.send.try_push(child)
        return FilterOutcome.FILTERED, plan

    # termination --------------------------------------------------------

    def termination_step(self, local_work_pending: bool) -> TerminationOutcome:
        """Handle a terminate token at the receive head.

        Forwarding requires full local quiescence (the caller folds wait
        queue, executing set, spawn buffers and coalescer into
        local_work_pending). Two consecutive quiet receipts halt the node.
        """
        head = self.recv.peek()
        if head is None or not head.is_terminate:
            return TerminationOutcome.NOT_TERMINATE

        # Work queued behind the terminate counts too: locally spawned tokens
        # land in this node's own receive queue, so they can sit behind a
        # requeued terminate without ever showing up in the wait queue.
        work_behind = any(not t.is_terminate for t in self.recv)
        if local_work_pending or len(self.wait) > 0 or work_behind:
            self.recv.pop()
            assert self.recv.try_push(head)   # back to the tail; space just freed
            self.terminate_armed = False
            return TerminationOutcome.HELD

        if self.send.free < 1:
            return TerminationOutcome.STALLED

        self.recv.pop()
        assert self.send.try_push(head)
        if self.terminate_armed:
            self.halted = True
            return TerminationOutcome.HALTED
        self.terminate_armed = True
        return TerminationOutcome.FORWARDED

    def note_local_activity(self) -> None:
        """A local launch or spawn between terminate receipts disarms."""
        self.terminate_armed = False
