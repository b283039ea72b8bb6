import functools

import pytest

from tpcohomology.catalog import available_entries, load_entry

SEED = 20240601
ENTRIES = available_entries()


@functools.lru_cache(maxsize=None)
def cached_entry(name: str):
    return load_entry(name)


@pytest.fixture(params=ENTRIES)
def entry(request):
    return cached_entry(request.param)


@pytest.fixture
def heisenberg():
    return cached_entry("heisenberg")


@pytest.fixture
def g41():
    return cached_entry("g41")


@pytest.fixture
def su2():
    return cached_entry("su2")


ACCEPTANCE_LINES: list = []


def record_criterion(number: int, ok: bool, detail: str):
    """Print and keep one pass/fail line for an acceptance criterion."""
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
