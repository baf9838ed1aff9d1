"""Task tokens and their fixed 21-byte wire codec.

Wire layout, little-endian:

    byte 0      = (task_id << 4) | from_node      (two 4-bit fields)
    bytes 1-4   = task_start
    bytes 5-8   = task_end
    bytes 9-12  = remote_start
    bytes 13-16 = remote_end
    bytes 17-20 = param

task_id 15 is the reserved TERMINATE sentinel; a terminate token carries
empty ranges and param 0.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace

from .addressing import EMPTY_RANGE, AddressRange

TOKEN_BYTES = 21
TASK_ID_BITS = 4
MAX_TASK_ID = 14
TERMINATE_TASK_ID = 15
_WIRE = struct.Struct("<B5I")

assert _WIRE.size == TOKEN_BYTES


class TokenCodecError(ValueError):
    """Unencodable field values or a malformed wire buffer."""


@dataclass(frozen=True)
class TaskToken:
    """One unit of work circulating the ring.

    task_range is the data the task wants to touch; remote_range (possibly
    empty) names data that must be staged from its owner before launch.
    param is one kernel-defined 32-bit scalar (0 doubles as "absent").
    """

    task_id: int
    from_node: int
    task_range: AddressRange
    remote_range: AddressRange = EMPTY_RANGE
    param: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.task_id <= TERMINATE_TASK_ID:
            raise TokenCodecError(f"task_id {self.task_id} does not fit in 4 bits")
        if not 0 <= self.from_node <= 15:
            raise TokenCodecError(f"from_node {self.from_node} does not fit in 4 bits")
        if not 0 <= self.param <= 0xFFFFFFFF:
            raise TokenCodecError(f"param {self.param} does not fit in 32 bits")

    @property
    def is_terminate(self) -> bool:
        return self.task_id == TERMINATE_TASK_ID

    def with_task_range(self, rng: AddressRange) -> TaskToken:
        return replace(self, task_range=rng)


def make_terminate(from_node: int) -> TaskToken:
    return TaskToken(TERMINATE_TASK_ID, from_node, EMPTY_RANGE, EMPTY_RANGE, 0)


def encode_token(token: TaskToken) -> bytes:
    """Pack a token into its 21-byte wire form."""
    # AddressRange admits end == 2**32 (one past the last address) but the
    # wire field is a plain uint32, so that bound is unencodable.
    for rng in (token.task_range, token.remote_range):
        if rng.end > 0xFFFFFFFF:
            raise TokenCodecError(f"range bound {rng.end} does not fit in 32 bits")
    return _WIRE.pack(
        (token.task_id << TASK_ID_BITS) | token.from_node,
        token.task_range.start,
        token.task_range.end,
        token.remote_range.start,
        token.remote_range.end,
        token.param,
    )


def decode_token(buf: bytes) -> TaskToken:
    """Unpack a 21-byte buffer; raises TokenCodecError on malformed input."""
    if len(buf) != TOKEN_BYTES:
        raise TokenCodecError(f"token buffer must be {TOKEN_BYTES} bytes, got {len(buf)}")
    head, ts, te, rs, re, param = _WIRE.unpack(buf)
    if ts > te or rs > re:
        raise TokenCodecError(f"decoded range is inverted: [{ts},{te}) / [{rs},{re})")
    return TaskToken(
        task_id=head >> TASK_ID_BITS,
        from_node=head & 0x0F,
        task_range=AddressRange(ts, te),
        remote_range=AddressRange(rs, re),
        param=param,
    )
