"""Shared application-side contract for the token runtime.

An app owns the problem data, carves the global address space into one
contiguous partition per node, provides the kernel functions, and knows
how to judge its own final answer against an independent oracle.
"""

from __future__ import annotations

import numpy as np

from ..addressing import AddressRange
from ..config import ConfigError, ScenarioConfig
from ..tokens import TaskToken


class RingApp:
    name = ""
    bytes_per_address = 4
    # extra elements appended to make the size divide the node count
    padded = 0

    def register(self, registry) -> None:
        raise NotImplementedError

    def partitions(self, nodes: int) -> list[AddressRange]:
        raise NotImplementedError

    def node_state(self, node_id: int, partition: AddressRange):
        raise NotImplementedError

    def root_tokens(self) -> list[TaskToken]:
        raise NotImplementedError

    def read_words(self, state, piece: AddressRange) -> np.ndarray:
        """Serve a remote-fetch request against this node's data."""
        raise NotImplementedError(f"{self.name}: no remotely readable data")

    def result(self, states) -> dict[str, np.ndarray]:
        raise NotImplementedError

    def oracle(self) -> dict[str, np.ndarray]:
        raise NotImplementedError

    def check(self, result: dict[str, np.ndarray]) -> list[str]:
        """Compare a run's result against the oracle; [] means clean."""
        expected = self.oracle()
        problems = []
        for key in sorted(expected):
            want = expected[key]
            got = result.get(key)
            if got is None:
                problems.append(f"{key}: missing from result")
                continue
            if got.shape != want.shape:
                problems.append(f"{key}: shape {got.shape} != {want.shape}")
                continue
            if np.issubdtype(want.dtype, np.floating):
                if not np.allclose(got, want, rtol=1e-9, atol=1e-12):
                    worst = float(np.max(np.abs(got - want)))
                    problems.append(f"{key}: float mismatch, max abs err {worst:.3e}")
            elif not np.array_equal(got, want):
                bad = int(np.count_nonzero(got != want))
                problems.append(f"{key}: {bad} of {want.size} entries differ")
        for key in sorted(result):
            if key not in expected:
                problems.append(f"{key}: unexpected result key")
        return problems


def even_partitions(total: int, nodes: int) -> list[AddressRange]:
    if total % nodes:
        raise ConfigError(
            f"address space of {total} does not divide across {nodes} nodes")
    span = total // nodes
    return [AddressRange(i * span, (i + 1) * span) for i in range(nodes)]


def padded_size(size: int, nodes: int) -> int:
    """Smallest multiple of nodes that is >= size."""
    return size if size % nodes == 0 else size + nodes - size % nodes


def require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def make_config(**overrides) -> ScenarioConfig:
    return ScenarioConfig(**overrides)
