"""Scenario execution, sweep CSV output, and report rendering.

A scenario record is one flat dict per (kernel, model, nodes) run, with a
fixed column order so downstream tooling can depend on the CSV schema.
"""

from __future__ import annotations

import csv
import json
import logging
import os
from dataclasses import replace

import numpy as np

from .apps import build_app, bsp_run, serial_replay
from .config import ConfigError, ScenarioConfig, config_to_text
from .metrics import digest_parts
from .simulator import Simulator

log = logging.getLogger("ringflow.harness")

# Reduction headline from the hardware calibration study this model was
# tuned against; reports print it next to the measured value for context.
REFERENCE_REDUCTION_PCT = 53.9

COLUMNS = (
    "kernel", "model", "accel", "size", "nodes", "seed", "density",
    "cycles", "time_us", "bytes_task_movement", "bytes_essential",
    "bytes_nonessential", "bytes_total", "tokens_created", "tokens_executed",
    "tokens_coalesced", "tokens_forwarded", "terminate_hops", "executed_ops",
    "duplicate_relaxations", "filter_operations", "supersteps",
    "serial_cycles", "oracle_ok", "digest",
)

_INT_COLUMNS = frozenset((
    "size", "nodes", "seed", "cycles", "bytes_task_movement",
    "bytes_essential", "bytes_nonessential", "bytes_total", "tokens_created",
    "tokens_executed", "tokens_coalesced", "tokens_forwarded",
    "terminate_hops", "executed_ops", "duplicate_relaxations",
    "filter_operations", "supersteps", "serial_cycles",
))

_SERIAL_CACHE: dict[ScenarioConfig, int] = {}


def _serial_cycles(config: ScenarioConfig) -> int:
    key = replace(config, model="arena")
    if key not in _SERIAL_CACHE:
        _SERIAL_CACHE[key] = serial_replay(key, build_app).cycles
    return _SERIAL_CACHE[key]


def _bsp_digest(br) -> str:
    head = json.dumps(
        {"cycles": br.cycles, "bytes": br.bytes_moved, "supersteps": br.supersteps},
        sort_keys=True, separators=(",", ":")).encode()
    parts = [head]
    for key in sorted(br.result):
        arr = np.ascontiguousarray(br.result[key])
        parts.append(key.encode())
        parts.append(str(arr.dtype).encode())
        parts.append(str(arr.shape).encode())
        parts.append(arr.tobytes())
    return digest_parts(*parts)


def run_scenario(config: ScenarioConfig, serial_baseline: bool = True) -> dict:
    """Run one scenario and return its flat record.

    The record carries every CSV column plus a `problems` list from the
    oracle comparison (empty when the run matched).
    """
    config.validate()
    app = build_app(config)
    log.info("run %s/%s size=%d nodes=%d seed=%d",
             config.kernel, config.model, config.size, config.nodes, config.seed)

    if config.model == "arena":
        rr = Simulator(config, app).run()
        led = rr.ledger
        result = rr.result
        record = {
            "cycles": led.total_cycles,
            "bytes_task_movement": led.bytes_task_movement,
            "bytes_essential": led.bytes_essential,
            "bytes_nonessential": led.bytes_nonessential,
            "bytes_total": led.bytes_total,
            "tokens_created": led.tokens_created,
            "tokens_executed": led.tokens_executed,
            "tokens_coalesced": led.tokens_coalesced,
            "tokens_forwarded": led.tokens_forwarded,
            "terminate_hops": led.terminate_hops,
            "executed_ops": led.executed_ops,
            "duplicate_relaxations": led.duplicate_relaxations,
            "filter_operations": led.filter_operations,
            "supersteps": 0,
            "digest": rr.digest,
        }
    else:
        br = bsp_run(config, app)
        result = br.result
        record = {
            "cycles": br.cycles,
            "bytes_task_movement": 0,
            "bytes_essential": 0,
            "bytes_nonessential": br.bytes_moved,
            "bytes_total": br.bytes_moved,
            "tokens_created": 0,
            "tokens_executed": 0,
            "tokens_coalesced": 0,
            "tokens_forwarded": 0,
            "terminate_hops": 0,
            "executed_ops": 0,
            "duplicate_relaxations": 0,
            "filter_operations": 0,
            "supersteps": br.supersteps,
            "digest": _bsp_digest(br),
        }

    problems = app.check(result)
    if problems:
        log.warning("oracle mismatch for %s/%s: %s",
                    config.kernel, config.model, "; ".join(problems))
    record.update({
        "kernel": config.kernel,
        "model": config.model,
        "accel": config.accel,
        "size": config.size,
        "nodes": config.nodes,
        "seed": config.seed,
        "density": config.density,
        "time_us": record["cycles"] / config.clock_mhz,
        "serial_cycles": _serial_cycles(config) if serial_baseline else 0,
        "oracle_ok": not problems,
        "problems": problems,
    })
    return record


def write_records_csv(records: list[dict], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(COLUMNS)
        for rec in records:
            row = []
            for col in COLUMNS:
                val = rec[col]
                if col == "time_us":
                    val = f"{val:.3f}"
                elif col == "oracle_ok":
                    val = "true" if val else "false"
                row.append(val)
            writer.writerow(row)


def read_records_csv(path: str) -> list[dict]:
    records = []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != COLUMNS:
            raise ConfigError(f"{path} does not have the sweep CSV schema")
        for row in reader:
            rec: dict = dict(row)
            for col in _INT_COLUMNS:
                rec[col] = int(rec[col])
            rec["time_us"] = float(rec["time_us"])
            rec["density"] = float(rec["density"])
            rec["oracle_ok"] = rec["oracle_ok"] == "true"
            records.append(rec)
    return records


def sweep(config: ScenarioConfig, nodes_list: list[int], models: list[str],
          out_dir: str) -> tuple[list[dict], str]:
    os.makedirs(out_dir, exist_ok=True)
    records = []
    for model in models:
        for nodes in nodes_list:
            cfg = config.with_updates(model=model, nodes=nodes)
            records.append(run_scenario(cfg))
    csv_path = os.path.join(out_dir, "sweep.csv")
    write_records_csv(records, csv_path)
    with open(os.path.join(out_dir, "scenario.ini"), "w", encoding="utf-8") as fh:
        fh.write(config_to_text(config))
    return records, csv_path


# report rendering --------------------------------------------------------

def _find_csv(path: str) -> str:
    if os.path.isfile(path):
        return path
    candidate = os.path.join(path, "sweep.csv")
    if os.path.isfile(candidate):
        return candidate
    found = sorted(
        f for f in os.listdir(path) if f.endswith(".csv")
    ) if os.path.isdir(path) else []
    if not found:
        raise ConfigError(f"no sweep CSV found under {path}")
    return os.path.join(path, found[0])


def _group(records: list[dict]):
    groups: dict[tuple, list[dict]] = {}
    for rec in records:
        key = (rec["kernel"], rec["model"], rec["accel"])
        groups.setdefault(key, []).append(rec)
    for rows in groups.values():
        rows.sort(key=lambda r: r["nodes"])
    return groups


def movement_lines(records: list[dict]) -> list[str]:
    """Byte-movement comparison lines for node counts both models ran."""
    lines = []
    by_key: dict[tuple, dict[str, int]] = {}
    for rec in records:
        key = (rec["kernel"], rec["size"], rec["nodes"])
        by_key.setdefault(key, {})[rec["model"]] = rec["bytes_total"]
    for (kernel, size, nodes), models in sorted(by_key.items()):
        if "arena" not in models or "bsp" not in models:
            continue
        arena, bsp = models["arena"], models["bsp"]
        if bsp == 0:
            continue
        reduction = 100.0 * (1.0 - arena / bsp)
        lines.append(
            f"{kernel} size={size} nodes={nodes}: token-driven moved {arena} B, "
            f"bulk-synchronous moved {bsp} B, reduction {reduction:.1f}% "
            f"(reference point {REFERENCE_REDUCTION_PCT}%)")
    return lines


def summary_text(records: list[dict]) -> str:
    widths = (6, 6, 5, 6, 6, 12, 12, 14, 7)
    header = ("kernel", "model", "accel", "size", "nodes", "cycles",
              "time_us", "bytes_total", "oracle")
    out = [" ".join(h.ljust(w) for h, w in zip(header, widths))]
    for rec in records:
        cells = (rec["kernel"], rec["model"], rec["accel"], str(rec["size"]),
                 str(rec["nodes"]), str(rec["cycles"]), f"{rec['time_us']:.1f}",
                 str(rec["bytes_total"]), "ok" if rec["oracle_ok"] else "FAIL")
        out.append(" ".join(c.ljust(w) for c, w in zip(cells, widths)))
    out.append("")
    for rec in records:
        if rec["model"] != "arena":
            continue
        out.append(
            f"{rec['kernel']} nodes={rec['nodes']} byte breakdown: "
            f"task movement {rec['bytes_task_movement']} B, "
            f"declared-range transfers {rec['bytes_essential']} B, "
            f"bulk traffic {rec['bytes_nonessential']} B")
    mv = movement_lines(records)
    if mv:
        out.append("")
        out.extend(mv)
    return "\n".join(out) + "\n"


def _plot_speedup(groups, path: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    kernels = sorted({k for k, _, _ in groups})
    fig, axes = plt.subplots(1, len(kernels), figsize=(4 * len(kernels), 3.2),
                             squeeze=False)
    for ax, kernel in zip(axes[0], kernels):
        for (k, model, accel), rows in sorted(groups.items()):
            if k != kernel or not rows:
                continue
            base = rows[0]["cycles"]
            xs = [r["nodes"] for r in rows]
            ys = [base / r["cycles"] for r in rows]
            ax.plot(xs, ys, marker="o", label=f"{model}/{accel}")
        ax.set_title(kernel)
        ax.set_xlabel("nodes")
        ax.set_ylabel("speedup vs fewest nodes")
        ax.set_xscale("log", base=2)
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _plot_movement(records, path: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    pairs: dict[str, dict[str, dict]] = {}
    for rec in records:
        slot = pairs.setdefault(rec["kernel"], {})
        prev = slot.get(rec["model"])
        if prev is None or rec["nodes"] > prev["nodes"]:
            slot[rec["model"]] = rec
    kernels = sorted(k for k, v in pairs.items() if "arena" in v and "bsp" in v)
    if not kernels:
        kernels = sorted(pairs)

    fig, ax = plt.subplots(figsize=(1.8 * max(len(kernels), 2) + 2, 3.4))
    xs = np.arange(len(kernels))
    width = 0.38
    task = [pairs[k]["arena"]["bytes_task_movement"] if "arena" in pairs[k] else 0
            for k in kernels]
    ess = [pairs[k]["arena"]["bytes_essential"] if "arena" in pairs[k] else 0
           for k in kernels]
    bulk = [pairs[k]["bsp"]["bytes_total"] if "bsp" in pairs[k] else 0
            for k in kernels]
    ax.bar(xs - width / 2, task, width, label="tokens")
    ax.bar(xs - width / 2, ess, width, bottom=task, label="declared ranges")
    ax.bar(xs + width / 2, bulk, width, label="bulk-synchronous")
    ax.set_xticks(xs, kernels)
    ax.set_ylabel("bytes moved")
    ax.set_yscale("log")
    ax.grid(True, axis="y", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def report(in_path: str) -> str:
    """Render summary.txt and plots next to the sweep CSV; return the text."""
    csv_path = _find_csv(in_path)
    records = read_records_csv(csv_path)
    out_dir = os.path.dirname(csv_path) or "."
    text = summary_text(records)
    with open(os.path.join(out_dir, "summary.txt"), "w", encoding="utf-8") as fh:
        fh.write(text)
    try:
        _plot_speedup(_group(records), os.path.join(out_dir, "speedup.png"))
        _plot_movement(records, os.path.join(out_dir, "movement.png"))
    except ImportError:                      # plotting backend unavailable
        log.warning("matplotlib not available; skipping plots")
    return text


# verification ------------------------------------------------------------

def verify_scenario(config: ScenarioConfig) -> list[tuple[str, bool, str]]:
    """Cross-check one scenario; returns (check, passed, detail) triples."""
    checks: list[tuple[str, bool, str]] = []

    def run_checked(name: str, fn) -> object:
        try:
            value = fn()
        except Exception as e:
            checks.append((name, False, f"{type(e).__name__}: {e}"))
            return None
        return value

    arena_cfg = config.with_updates(model="arena")
    app = build_app(arena_cfg)
    rr = run_checked("token run", lambda: Simulator(arena_cfg, app).run())
    if rr is not None:
        problems = app.check(rr.result)
        checks.append(("token oracle", not problems, "; ".join(problems)))
        rr2 = run_checked("token rerun",
                          lambda: Simulator(arena_cfg, build_app(arena_cfg)).run())
        if rr2 is not None:
            same = rr2.digest == rr.digest
            checks.append(("determinism", same,
                           "" if same else f"{rr.digest[:12]} != {rr2.digest[:12]}"))
        stats = run_checked("serial replay",
                            lambda: serial_replay(arena_cfg, build_app))
        if stats is not None:
            problems = app.check(stats.result)
            checks.append(("serial oracle", not problems, "; ".join(problems)))
            if config.kernel != "sssp":
                # schedule-independent kernels must charge identical work
                same = stats.ops == rr.ledger.executed_ops
                checks.append(
                    ("work calibration", same,
                     "" if same else f"serial {stats.ops} != run {rr.ledger.executed_ops}"))

    bsp_cfg = config.with_updates(model="bsp")
    bapp = build_app(bsp_cfg)
    br = run_checked("bulk-synchronous run", lambda: bsp_run(bsp_cfg, bapp))
    if br is not None:
        problems = bapp.check(br.result)
        checks.append(("bulk-synchronous oracle", not problems, "; ".join(problems)))
    return checks


def selftest() -> list[tuple[str, bool, str]]:
    """Small end-to-end matrix across every kernel."""
    scenarios = (
        dict(kernel="sssp", size=48, nodes=2, seed=3),
        dict(kernel="gemm", size=24, nodes=2, seed=4),
        dict(kernel="spmv", size=48, nodes=2, seed=5),
        dict(kernel="nw", size=32, block=8, nodes=2, seed=6),
    )
    checks = []
    for kw in scenarios:
        cfg = ScenarioConfig(**kw)
        cfg.validate()
        for name, ok, detail in verify_scenario(cfg):
            checks.append((f"{kw['kernel']}: {name}", ok, detail))
    return checks
