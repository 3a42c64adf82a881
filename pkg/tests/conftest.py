import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("fucik", deadline=None, derandomize=True, print_blob=True)
settings.load_profile("fucik")

ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def record(number: int, title: str, ok: bool, detail: str) -> None:
    ACCEPTANCE[number] = (title, ok, detail)
    print(f"criterion {number} [{title}]: {'PASS' if ok else 'FAIL'} {detail}")


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"{number}. {title}: {'PASS' if ok else 'FAIL'}  {detail}")
