from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"


@pytest.fixture
def genus3_path() -> Path:
    return FIXTURES / "genus3_hyperelliptic_shimura.json"


@pytest.fixture
def genus4_path() -> Path:
    return FIXTURES / "genus4_strictly_maximal.json"


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report_line():
    """Record the PASS/FAIL line of an acceptance criterion."""
    def emit(number: int, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
