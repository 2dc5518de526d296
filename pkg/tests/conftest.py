import time

import pytest

_acceptance_lines = []


@pytest.fixture
def record():
    """Log one pass/fail line per acceptance criterion."""

    def _record(number, title, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}"
        if detail:
            line += f"  ({detail})"
        _acceptance_lines.append(line)
        print(line)
        return ok

    return _record


_session = {}


def pytest_sessionstart(session):
    _session["start"] = time.perf_counter()


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        elapsed = time.perf_counter() - _session["start"]
        terminalreporter.write_line(
            f"session wall time {elapsed:.1f} s (criterion 10 budget: 60 s)")
        for line in sorted(_acceptance_lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
