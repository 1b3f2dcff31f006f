"""Shared test helpers and the acceptance-criteria terminal reporter.

The acceptance tests in ``test_acceptance.py`` register one labeled result
line per criterion via :func:`record_acceptance`; this plugin replays all of
them in a dedicated section at the end of the pytest run so the full verdict
list is visible in one place regardless of output capturing.
"""

from __future__ import annotations

ACCEPTANCE_RESULTS: list[tuple[int, str]] = []


def record_acceptance(num: int, name: str, ok: bool, detail: str = "") -> None:
    """Register and print one acceptance verdict line."""
    line = f"[acceptance {num:02d}] {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" -- {detail}"
    ACCEPTANCE_RESULTS.append((num, line))
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config) -> None:
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.ensure_newline()
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(line)
