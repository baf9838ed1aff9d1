"""Scenario config: INI round-trip, validation, unit helpers."""

import pytest

from ringflow.config import (ConfigError, ScenarioConfig, config_from_text,
                             config_to_text, load_config)


def test_default_config_is_valid():
    ScenarioConfig().validate()


def test_text_round_trip_default():
    cfg = ScenarioConfig()
    assert config_from_text(config_to_text(cfg)) == cfg


def test_text_round_trip_modified():
    cfg = ScenarioConfig(kernel="nw", model="bsp", size=128, nodes=8,
                         seed=42, density=0.0625, block=32, hop_cycles=160,
                         latency_jitter=0.25, coalesce_window=4,
                         greedy_launch=True, debug_checks=True,
                         speedup_4=19.5, input_file="w.txt")
    assert config_from_text(config_to_text(cfg)) == cfg


def test_text_is_ini_shaped():
    text = config_to_text(ScenarioConfig())
    assert "[scenario]" in text
    assert "kernel = sssp" in text
    assert "[network]" in text


def test_unknown_key_rejected():
    text = config_to_text(ScenarioConfig()) + "\nwarp_speed = 9\n"
    with pytest.raises(ConfigError):
        config_from_text(text)


def test_unknown_section_rejected():
    with pytest.raises(ConfigError):
        config_from_text("[warp]\nspeed = 9\n")


def test_bad_value_type_rejected():
    text = config_to_text(ScenarioConfig()).replace("nodes = 4", "nodes = few")
    with pytest.raises(ConfigError):
        config_from_text(text)


def test_invalid_value_rejected_on_parse():
    text = config_to_text(ScenarioConfig()).replace("nodes = 4", "nodes = 99")
    with pytest.raises(ConfigError):
        config_from_text(text)


@pytest.mark.parametrize("kw", [
    dict(kernel="fft"),
    dict(model="dataflow"),
    dict(accel="tpu"),
    dict(nodes=0),
    dict(nodes=17),
    dict(size=0),
    dict(seed=-1),
    dict(density=1.5),
    dict(density=-0.1),
    dict(block=1),
    dict(source=64),          # == default size
    dict(cgra_groups=3),
    dict(hop_cycles=-1),
    dict(bandwidth_gbps=0.0),
    dict(clock_mhz=0.0),
    dict(latency_jitter=1.0),
    dict(link_capacity=-1),
    dict(recv_capacity=0),
    dict(coalesce_window=0),
    dict(quiet_hops=-0.5),
    dict(speedup_2=-1.0),
])
def test_validate_rejects(kw):
    with pytest.raises(ConfigError):
        ScenarioConfig(**kw).validate()


def test_bytes_per_cycle_default():
    # 100 Gb/s at 800 MHz is 12.5 bytes per cycle
    assert ScenarioConfig().bytes_per_cycle == pytest.approx(12.5)


def test_serialization_cycles():
    cfg = ScenarioConfig()
    assert cfg.serialization_cycles(0) == 0
    assert cfg.serialization_cycles(21) == 2
    assert cfg.serialization_cycles(4000) == 320
    assert cfg.serialization_cycles(1) == 1   # never less than one cycle


def test_quiet_cycles():
    assert ScenarioConfig(hop_cycles=800, quiet_hops=1.0).quiet_cycles == 800
    assert ScenarioConfig(hop_cycles=40, quiet_hops=0.25).quiet_cycles == 10
    assert ScenarioConfig(hop_cycles=0, quiet_hops=1.0).quiet_cycles == 1


def test_with_updates_returns_new_validated_config():
    cfg = ScenarioConfig()
    other = cfg.with_updates(nodes=8, kernel="gemm")
    assert other.nodes == 8 and other.kernel == "gemm"
    assert cfg.nodes == 4   # original untouched
    with pytest.raises(ConfigError):
        cfg.with_updates(nodes=0)


def test_load_config_round_trip(tmp_path):
    cfg = ScenarioConfig(kernel="spmv", nodes=2, size=48)
    path = tmp_path / "scenario.ini"
    path.write_text(config_to_text(cfg))
    assert load_config(path) == cfg


def test_load_config_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/scenario.ini")
