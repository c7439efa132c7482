import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_ACCEPTANCE = []


def pytest_configure(config):
    config._reslab_acceptance = _ACCEPTANCE


@pytest.fixture
def acceptance_line():
    """Record one pass/fail line for the acceptance summary."""
    def record(number, label, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {label}" + (f" ({detail})" if detail else "")
        _ACCEPTANCE.append((number, line))
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE, key=lambda t: (t[0], t[1])):
        terminalreporter.write_line(line)
