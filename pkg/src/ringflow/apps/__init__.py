"""Application kernels and their baselines."""

from __future__ import annotations

from ..config import ConfigError, ScenarioConfig
from .base import RingApp
from .bsp import BSPResult, bsp_run
from .gemm import GEMMApp
from .nw import NWApp
from .serial import SerialStats, serial_replay
from .spmv import SPMVApp
from .sssp import SSSPApp

APPS = {
    "sssp": SSSPApp,
    "gemm": GEMMApp,
    "spmv": SPMVApp,
    "nw": NWApp,
}


def build_app(config: ScenarioConfig) -> RingApp:
    try:
        cls = APPS[config.kernel]
    except KeyError:
        raise ConfigError(f"unknown kernel {config.kernel!r}") from None
    return cls(config)

__all__ = [
    "APPS",
    "BSPResult",
    "GEMMApp",
    "NWApp",
    "RingApp",
    "SPMVApp",
    "SSSPApp",
    "SerialStats",
    "build_app",
    "bsp_run",
    "serial_replay",
]
