"""Ring links for task tokens and a point-to-point network for bulk data.

The two networks are independent: tokens never queue behind data transfers.
Every token hop charges its fixed 21 wire bytes to the task-movement ledger;
bulk transfers charge payload bytes once per link they traverse (ring
distance), keeping the two categories physically comparable.
"""

from __future__ import annotations

from bisect import bisect_right
from collections import deque
from dataclasses import dataclass

from .addressing import AddressRange
from .tokens import TOKEN_BYTES, TaskToken


class PartitionDirectory:
    """Maps word addresses to their owning node.

    Partitions must be disjoint, contiguous per node, and cover the whole
    address space in ascending node order.
    """

    def __init__(self, partitions: list[AddressRange]):
        if not partitions:
            raise ValueError("directory needs at least one partition")
        for i, part in enumerate(partitions):
            if part.empty:
                raise ValueError(f"node {i} has an empty partition")
            if i and partitions[i - 1].end != part.start:
                raise ValueError("partitions must tile the address space in node order")
        self.partitions = partitions
        self._starts = [p.start for p in partitions]

    @property
    def space(self) -> AddressRange:
        return AddressRange(self.partitions[0].start, self.partitions[-1].end)

    def owner_of(self, addr: int) -> int:
        idx = bisect_right(self._starts, addr) - 1
        if idx < 0 or not self.partitions[idx].contains(addr):
            raise ValueError(f"address {addr} is outside the partitioned space")
        return idx

    def split(self, rng: AddressRange) -> list[tuple[int, AddressRange]]:
        """Break a range into (owner, subrange) pieces."""
        if rng.empty:
            return []
        if not self.space.covers(rng):
            raise ValueError(f"range {rng} is outside the partitioned space {self.space}")
        out = []
        node = self.owner_of(rng.start)
        cursor = rng.start
        while cursor < rng.end:
            part = self.partitions[node]
            piece = AddressRange(cursor, min(rng.end, part.end))
            out.append((node, piece))
            cursor = piece.end
            node += 1
        return out


def ring_distance(src: int, dst: int, nodes: int) -> int:
    """Hops a token travels from src to dst on the unidirectional ring."""
    return (dst - src) % nodes


def data_distance(a: int, b: int, nodes: int) -> int:
    """Links a bulk transfer crosses between a and b.

    The data network is point to point over the same physical layout, so
    request and response take the short way around, unlike task tokens.
    """
    fwd = (b - a) % nodes
    return min(fwd, nodes - fwd)


@dataclass
class LinkStats:
    injected: int = 0
    delivered: int = 0


class RingLink:
    """Unidirectional link from node src to node (src + 1) % N.

    Tokens serialize onto the wire back to back (a new token may enter
    every serialization interval) and arrive hop_latency later, in FIFO
    order. A non-zero capacity instead caps the number of tokens in flight
    or waiting at the far end, which throttles the link hard; capacity 0
    means bandwidth-limited pipelining.
    """

    def __init__(self, src: int, dst: int, hop_cycles: int,
                 inject_interval: int, capacity: int):
        self.src = src
        self.dst = dst
        self.hop_cycles = hop_cycles
        self.inject_interval = max(1, inject_interval)
        self.capacity = capacity
        self.next_inject = 0
        self.inflight = 0
        self.pending = deque()       # arrived, waiting for receive-queue space
        self.last_delivery = 0
        self.stats = LinkStats()

    def can_inject(self, now: int) -> bool:
        if now < self.next_inject:
            return False
        if self.capacity and (self.inflight + len(self.pending)) >= self.capacity:
            return False
        return True

    def inject(self, token: TaskToken, now: int, jitter_cycles: int = 0) -> int:
        """Put a token on the wire; returns its delivery time."""
        assert self.can_inject(now)
        self.next_inject = now + self.inject_interval
        delivery = max(now + self.hop_cycles + jitter_cycles, self.last_delivery)
        self.last_delivery = delivery
        self.inflight += 1
        self.stats.injected += 1
        return delivery

    def deliver(self, token: TaskToken) -> None:
        """Wire latency elapsed; token now waits at the far end."""
        self.inflight -= 1
        self.pending.append(token)
        self.stats.delivered += 1

    @property
    def occupancy(self) -> int:
        return self.inflight + len(self.pending)


class DataNetwork:
    """Latency/byte arithmetic for remote-range acquisitions.

    One acquisition may touch several owners; each (owner, subrange) piece
    costs a round trip of hops plus payload serialization, and the whole
    acquisition completes when its slowest piece does. Self-owned pieces
    are free. Payload bytes are charged per link traversed on the response
    path; the tiny request message is not charged.
    """

    def __init__(self, directory: PartitionDirectory, nodes: int,
                 hop_cycles: int, bytes_per_cycle: float, bytes_per_address: int):
        self.directory = directory
        self.nodes = nodes
        self.hop_cycles = hop_cycles
        self.bytes_per_cycle = bytes_per_cycle
        self.bytes_per_address = bytes_per_address

    def plan(self, requester: int, rng: AddressRange,
             now: int) -> tuple[int, list[tuple[int, AddressRange]], int]:
        """Returns (completion_time, owner pieces, essential bytes charged)."""
        pieces = self.directory.split(rng)
        done = now
        charged = 0
        for owner, piece in pieces:
            dist = data_distance(requester, owner, self.nodes)
            if dist == 0:
                continue
            payload = len(piece) * self.bytes_per_address
            latency = 2 * dist * self.hop_cycles + self._serialization(payload)
            done = max(done, now + latency)
            charged += payload * dist
        return done, pieces, charged

    def _serialization(self, nbytes: int) -> int:
        if nbytes == 0:
            return 0
        cycles = int(-(-nbytes // self.bytes_per_cycle))  # ceil for float divisor
        return max(1, cycles)


TOKEN_WIRE_BYTES = TOKEN_BYTES
