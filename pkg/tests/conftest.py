"""Shared pytest wiring.

The acceptance tests register one verdict line per criterion; a terminal
summary hook prints them after the run so the pass/fail ledger survives
output capturing.
"""

from __future__ import annotations

ACCEPTANCE_LINES: list[str] = []


def record_criterion(tag: str, ok: bool, detail: str = "") -> None:
    verdict = "PASS" if ok else "FAIL"
    line = f"{tag:<58s} {verdict}"
    if detail:
        line += f"  ({detail})"
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
