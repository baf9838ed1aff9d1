"""Spawned-token coalescing: merge adjacent same-kind ranges before release.

Two tokens merge when they carry the same task id, param and remote range
and their task ranges touch end-to-start. The buffer does not merge pair by
pair in arrival order; every step it re-canonicalizes its whole pending set
with a sorted sweep, so the surviving multiset depends only on which tokens
are pending, never on the order they arrived or merged. That is what makes
coalescing confluent and the simulation insensitive to spawn interleaving.
"""

from __future__ import annotations

from dataclasses import dataclass

from .addressing import AddressRange
from .tokens import TaskToken


def merge_key(token: TaskToken) -> tuple:
    return (token.task_id, token.param, token.remote_range.start, token.remote_range.end)


def mergeable(u: TaskToken, v: TaskToken) -> bool:
    if merge_key(u) != merge_key(v):
        return False
    return u.task_range.end == v.task_range.start or v.task_range.end == u.task_range.start


def merge_pair(u: TaskToken, v: TaskToken) -> TaskToken:
    """Fuse two adjacent tokens; the earlier range's provenance wins."""
    if not mergeable(u, v):
        raise ValueError(f"tokens are not mergeable: {u} / {v}")
    first, second = (u, v) if u.task_range.end == v.task_range.start else (v, u)
    return first.with_task_range(
        AddressRange(first.task_range.start, second.task_range.end)
    )


def merge_closure(tokens: list[TaskToken]) -> list[TaskToken]:
    """Canonical fixpoint of merging, independent of input order.

    Tokens are bucketed by merge key and swept in (start, end) order,
    fusing whenever the accumulated range ends exactly where the next one
    begins. Exact duplicates and overlapping ranges are never fused.
    """
    buckets: dict[tuple, list[TaskToken]] = {}
    for t in tokens:
        buckets.setdefault(merge_key(t), []).append(t)
    out: list[TaskToken] = []
    for key in sorted(buckets):
        bucket = sorted(buckets[key], key=lambda t: (t.task_range.start, t.task_range.end))
        acc = bucket[0]
        for t in bucket[1:]:
            if acc.task_range.end == t.task_range.start:
                acc = acc.with_task_range(
                    AddressRange(acc.task_range.start, t.task_range.end)
                )
            else:
                out.append(acc)
                acc = t
        out.append(acc)
    return out


@dataclass
class _Pending:
    seq: int          # arrival order; a merged token keeps its oldest seq
    token: TaskToken


class CoalesceBuffer:
    """Bounded pending window with oldest-first release.

    step() canonicalizes the window and hands back at most one token
    (every pending token when drain_all is set). Tokens refused by the
    downstream queue stay pending and are offered again next step.
    """

    def __init__(self, window: int = 16, drain_all: bool = False):
        if window < 1:
            raise ValueError("coalescing window must be >= 1")
        self.window = window
        self.drain_all = drain_all
        self._pending: list[_Pending] = []
        self._next_seq = 0
        self._dirty = False

    @property
    def pending_count(self) -> int:
        return len(self._pending)

    @property
    def has_space(self) -> bool:
        return len(self._pending) < self.window

    def add(self, token: TaskToken) -> bool:
        if not self.has_space:
            return False
        self._pending.append(_Pending(self._next_seq, token))
        self._next_seq += 1
        self._dirty = True
        return True

    def _canonicalize(self) -> int:
        """Sweep-merge the window; returns the number of merge operations."""
        if not self._dirty:
            return 0
        self._dirty = False
        if len(self._pending) < 2:
            return 0
        buckets: dict[tuple, list[_Pending]] = {}
        for p in self._pending:
            buckets.setdefault(merge_key(p.token), []).append(p)
        merged: list[_Pending] = []
        merges = 0
        for key in sorted(buckets):
            bucket = sorted(
                buckets[key],
                key=lambda p: (p.token.task_range.start, p.token.task_range.end, p.seq),
            )
            acc = bucket[0]
            for p in bucket[1:]:
                if acc.token.task_range.end == p.token.task_range.start:
                    acc = _Pending(
                        min(acc.seq, p.seq),
                        acc.token.with_task_range(
                            AddressRange(acc.token.task_range.start, p.token.task_range.end)
                        ),
                    )
                    merges += 1
                else:
                    merged.append(acc)
                    acc = p
            merged.append(acc)
        merged.sort(key=lambda p: p.seq)
        self._pending = merged
        return merges

    def step(self, release) -> tuple[int, int]:
        """One coalescer cycle: canonicalize, then release oldest-first.

        release(token) returns False when the receive queue is full; the
        token stays pending. Returns (merge_ops, released_count).
        """
        merges = self._canonicalize()
        released = 0
        budget = len(self._pending) if self.drain_all else 1
        while self._pending and released < budget:
            if not release(self._pending[0].token):
                break
            self._pending.pop(0)
            released += 1
        return merges, released
