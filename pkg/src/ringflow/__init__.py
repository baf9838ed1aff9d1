"""Deterministic simulator for a token-circulating ring of accelerator nodes.

Work travels as 21-byte task tokens around a unidirectional ring; each
node keeps the tokens whose address range overlaps its partition, fetches
any declared remote ranges, runs the task on a grid of reconfigurable
compute groups, and forwards the rest. The package bundles the runtime
model, four application kernels with independent oracles, a
bulk-synchronous baseline, and a sweep/report harness.
"""

from .addressing import EMPTY_RANGE, AddressRange, RangeError, RangeRelation, range_relation
from .apps import build_app, bsp_run, serial_replay
from .config import (
    ConfigError,
    ScenarioConfig,
    config_from_text,
    config_to_text,
    load_config,
)
from .harness import run_scenario, sweep
from .simulator import RunResult, SimulationError, SimulationFault, Simulator
from .tokens import TaskToken, TokenCodecError, decode_token, encode_token

__version__ = "0.1.0"

__all__ = [
    "AddressRange",
    "ConfigError",
    "EMPTY_RANGE",
    "RangeError",
    "RangeRelation",
    "RunResult",
    "ScenarioConfig",
    "SimulationError",
    "SimulationFault",
    "Simulator",
    "TaskToken",
    "TokenCodecError",
    "__version__",
    "build_app",
    "bsp_run",
    "config_from_text",
    "config_to_text",
    "decode_token",
    "encode_token",
    "load_config",
    "range_relation",
    "run_scenario",
    "serial_replay",
    "sweep",
]
