from __future__ import annotations

import pytest

_LINES_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_LINES_KEY] = {}


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""
    lines = request.config.stash[_LINES_KEY]

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"CRITERION {number:2d}: {'PASS' if ok else 'FAIL'} -- {detail}"
        lines[number] = line
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES_KEY, {})
    if not lines:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(lines):
        terminalreporter.write_line(lines[number])
