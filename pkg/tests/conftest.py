import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_LINES = []


@pytest.fixture
def verdict():
    """Record one acceptance line: verdict(number, passed, detail)."""
    def record(number, passed, detail):
        tag = passed if isinstance(passed, str) else ("PASS" if passed else "FAIL")
        line = f"[{tag}] criterion {number}: {detail}"
        _LINES.append(line)
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
