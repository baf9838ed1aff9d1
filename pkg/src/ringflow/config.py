"""Scenario configuration: a typed dataclass with an INI text representation.

The file format is plain configparser INI (sections of key = value lines),
chosen because it is human-readable and round-trips: parse(serialize(cfg))
== cfg for every valid config. Unknown keys or sections are rejected so a
typo cannot silently fall back to a default.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field, fields, replace

KERNELS = ("sssp", "gemm", "spmv", "nw")
MODELS = ("arena", "bsp")
ACCELS = ("cpu", "cgra")


class ConfigError(ValueError):
    """Invalid scenario configuration; maps to CLI exit code 2."""


@dataclass(frozen=True)
class ScenarioConfig:
    # [scenario]
    kernel: str = "sssp"
    model: str = "arena"
    accel: str = "cgra"
    size: int = 64
    nodes: int = 4
    seed: int = 1
    density: float = 0.3
    block: int = 16
    source: int = 0
    match_score: int = 1
    mismatch_score: int = -1
    gap_score: int = -1
    input_file: str = ""

    # [cost]
    clock_mhz: float = 800.0
    reconfig_cycles: int = 8
    spawn_short_cycles: int = 1
    spawn_long_cycles: int = 2
    reconfig_every_launch: bool = False
    speedup_1: float = 0.0   # 0.0 = use the kernel's default table
    speedup_2: float = 0.0
    speedup_4: float = 0.0

    # [network]
    hop_cycles: int = 800
    bandwidth_gbps: float = 80.0
    latency_jitter: float = 0.0
    link_capacity: int = 0   # 0 = pipelined at link bandwidth; >=1 = strict in-flight cap

    # [queues]
    recv_capacity: int = 8
    wait_capacity: int = 8
    send_capacity: int = 8
    spawn_queues: int = 4
    spawn_queue_capacity: int = 4

    # [policy]
    coalesce_window: int = 16
    coalesce_drain: bool = False
    greedy_launch: bool = False
    cgra_groups: int = 4
    iteration_cycles: int = 1
    quiet_hops: float = 1.0
    debug_checks: bool = False

    def validate(self) -> None:
        if self.kernel not in KERNELS:
            raise ConfigError(f"unknown kernel {self.kernel!r}, expected one of {KERNELS}")
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}, expected one of {MODELS}")
        if self.accel not in ACCELS:
            raise ConfigError(f"unknown accel {self.accel!r}, expected one of {ACCELS}")
        if not 1 <= self.nodes <= 16:
            raise ConfigError(f"nodes must be in 1..16, got {self.nodes}")
        if self.size < 1:
            raise ConfigError(f"size must be >= 1, got {self.size}")
        if self.seed < 0:
            raise ConfigError(f"seed must be >= 0, got {self.seed}")
        if not 0.0 <= self.density <= 1.0:
            raise ConfigError(f"density must be in [0, 1], got {self.density}")
        if self.block < 2:
            raise ConfigError(f"block must be >= 2, got {self.block}")
        if not 0 <= self.source < self.size:
            raise ConfigError(f"source must be in [0, {self.size}), got {self.source}")
        if self.cgra_groups not in (1, 2, 4):
            raise ConfigError(f"cgra_groups must be 1, 2 or 4, got {self.cgra_groups}")
        if self.hop_cycles < 0 or self.iteration_cycles < 0:
            raise ConfigError("hop_cycles and iteration_cycles must be >= 0")
        if self.bandwidth_gbps <= 0 or self.clock_mhz <= 0:
            raise ConfigError("bandwidth_gbps and clock_mhz must be > 0")
        if not 0.0 <= self.latency_jitter < 1.0:
            raise ConfigError(f"latency_jitter must be in [0, 1), got {self.latency_jitter}")
        if self.link_capacity < 0:
            raise ConfigError(f"link_capacity must be >= 0, got {self.link_capacity}")
        for name in ("recv_capacity", "wait_capacity", "send_capacity",
                     "spawn_queues", "spawn_queue_capacity", "coalesce_window"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.quiet_hops < 0:
            raise ConfigError(f"quiet_hops must be >= 0, got {self.quiet_hops}")
        for name in ("speedup_1", "speedup_2", "speedup_4"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0 (0 selects the kernel default)")

    # unit helpers -------------------------------------------------------

    @property
    def bytes_per_cycle(self) -> float:
        return (self.bandwidth_gbps * 1e9 / 8.0) / (self.clock_mhz * 1e6)

    @property
    def quiet_cycles(self) -> int:
        return max(1, int(round(self.quiet_hops * self.hop_cycles)))

    def serialization_cycles(self, nbytes: int) -> int:
        if nbytes == 0:
            return 0
        return max(1, math.ceil(nbytes / self.bytes_per_cycle))

    def with_updates(self, **kw) -> "ScenarioConfig":
        cfg = replace(self, **kw)
        cfg.validate()
        return cfg


_SECTIONS = {
    "scenario": ("kernel", "model", "accel", "size", "nodes", "seed", "density",
                 "block", "source", "match_score", "mismatch_score", "gap_score",
                 "input_file"),
    "cost": ("clock_mhz", "reconfig_cycles", "spawn_short_cycles", "spawn_long_cycles",
             "reconfig_every_launch", "speedup_1", "speedup_2", "speedup_4"),
    "network": ("hop_cycles", "bandwidth_gbps", "latency_jitter", "link_capacity"),
    "queues": ("recv_capacity", "wait_capacity", "send_capacity",
               "spawn_queues", "spawn_queue_capacity"),
    "policy": ("coalesce_window", "coalesce_drain", "greedy_launch", "cgra_groups",
               "iteration_cycles", "quiet_hops", "debug_checks"),
}

_FIELD_TYPES = {f.name: f.type for f in fields(ScenarioConfig)}


def _parse_value(name: str, raw: str):
    ftype = _FIELD_TYPES[name]
    raw = raw.strip()
    try:
        if ftype == "bool":
            if raw.lower() in ("true", "1", "yes", "on"):
                return True
            if raw.lower() in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        if ftype == "int":
            return int(raw)
        if ftype == "float":
            return float(raw)
        return raw
    except ValueError as e:
        raise ConfigError(f"bad value for {name}: {raw!r}") from e


def config_to_text(cfg: ScenarioConfig) -> str:
    out = io.StringIO()
    for section, names in _SECTIONS.items():
        out.write(f"[{section}]\n")
        for name in names:
            val = getattr(cfg, name)
            if isinstance(val, bool):
                val = "true" if val else "false"
            out.write(f"{name} = {val}\n")
        out.write("\n")
    return out.getvalue()


def config_from_text(text: str) -> ScenarioConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as e:
        raise ConfigError(f"cannot parse config: {e}") from e

    values = {}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown config section [{section}]")
        allowed = _SECTIONS[section]
        for name, raw in parser.items(section):
            if name not in allowed:
                raise ConfigError(f"unknown key {name!r} in section [{section}]")
            values[name] = _parse_value(name, raw)

    cfg = ScenarioConfig(**values)
    cfg.validate()
    return cfg


def load_config(path: str) -> ScenarioConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    return config_from_text(text)
