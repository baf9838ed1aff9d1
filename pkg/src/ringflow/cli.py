"""Command line front end.

Exit codes: 0 success, 1 oracle mismatch or failed check, 2 bad
configuration or usage. Set RINGFLOW_LOG=DEBUG (or INFO, WARNING, ...)
for progress logging on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import harness
from .config import ConfigError, load_config

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_CONFIG = 2


def _setup_logging() -> None:
    level_name = os.environ.get("RINGFLOW_LOG", "WARNING").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(
        level=level, stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s")


def _parse_list(raw: str, cast, what: str):
    try:
        items = [cast(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"bad {what} list: {raw!r}") from None
    if not items:
        raise ConfigError(f"empty {what} list: {raw!r}")
    return items


def _print_record(rec: dict) -> None:
    print(f"kernel={rec['kernel']} model={rec['model']} accel={rec['accel']} "
          f"size={rec['size']} nodes={rec['nodes']} seed={rec['seed']}")
    print(f"cycles={rec['cycles']} time_us={rec['time_us']:.3f} "
          f"serial_cycles={rec['serial_cycles']}")
    print(f"bytes: tokens={rec['bytes_task_movement']} "
          f"ranges={rec['bytes_essential']} bulk={rec['bytes_nonessential']} "
          f"total={rec['bytes_total']}")
    print(f"tokens: created={rec['tokens_created']} "
          f"executed={rec['tokens_executed']} coalesced={rec['tokens_coalesced']} "
          f"forwarded={rec['tokens_forwarded']}")
    print(f"oracle: {'ok' if rec['oracle_ok'] else 'MISMATCH'}")
    for problem in rec["problems"]:
        print(f"  {problem}")
    print(f"digest: {rec['digest']}")


def cmd_run(args) -> int:
    config = load_config(args.config)
    rec = harness.run_scenario(config)
    _print_record(rec)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        harness.write_records_csv([rec], os.path.join(args.out, "run.csv"))
        payload = {k: v for k, v in rec.items() if k != "problems"}
        payload["problems"] = list(rec["problems"])
        with open(os.path.join(args.out, "run.json"), "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK if rec["oracle_ok"] else EXIT_MISMATCH


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    nodes_list = _parse_list(args.nodes, int, "nodes")
    models = _parse_list(args.models, str, "models")
    records, csv_path = harness.sweep(config, nodes_list, models, args.out)
    bad = 0
    for rec in records:
        flag = "ok" if rec["oracle_ok"] else "MISMATCH"
        bad += not rec["oracle_ok"]
        print(f"{rec['kernel']} {rec['model']} nodes={rec['nodes']}: "
              f"cycles={rec['cycles']} bytes={rec['bytes_total']} {flag}")
    print(f"wrote {csv_path}")
    return EXIT_MISMATCH if bad else EXIT_OK


def cmd_report(args) -> int:
    print(harness.report(args.in_path), end="")
    return EXIT_OK


def _print_checks(checks: list[tuple[str, bool, str]]) -> int:
    failed = 0
    for name, ok, detail in checks:
        if ok:
            print(f"PASS {name}")
        else:
            failed += 1
            print(f"FAIL {name}: {detail}")
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_MISMATCH if failed else EXIT_OK


def cmd_verify(args) -> int:
    return _print_checks(harness.verify_scenario(load_config(args.config)))


def cmd_selftest(args) -> int:
    return _print_checks(harness.selftest())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringflow",
        description="Discrete-event simulator for a token-circulating ring "
                    "of reconfigurable-accelerator nodes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario")
    p_run.add_argument("--config", required=True, help="scenario INI file")
    p_run.add_argument("--out", default="", help="directory for run.csv/run.json")
    p_run.set_defaults(fn=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a nodes x models grid")
    p_sweep.add_argument("--config", required=True, help="scenario INI file")
    p_sweep.add_argument("--nodes", required=True, help="e.g. 1,2,4,8,16")
    p_sweep.add_argument("--models", required=True, help="e.g. arena,bsp")
    p_sweep.add_argument("--out", default="runs", help="output directory")
    p_sweep.set_defaults(fn=cmd_sweep)

    p_report = sub.add_parser("report", help="render plots and summary from a sweep")
    p_report.add_argument("--in", dest="in_path", required=True,
                          help="sweep output directory or CSV file")
    p_report.set_defaults(fn=cmd_report)

    p_verify = sub.add_parser("verify", help="cross-check one scenario against oracles")
    p_verify.add_argument("--config", required=True, help="scenario INI file")
    p_verify.set_defaults(fn=cmd_verify)

    p_self = sub.add_parser("selftest", help="small end-to-end matrix over all kernels")
    p_self.set_defaults(fn=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
