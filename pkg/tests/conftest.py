import time

import pytest

from heckepoly.arith import build_tables
from heckepoly.eigenform import delta_coefficients

SMALL = 10_000
DESK = 10**6

# filled by the acceptance tests, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []
# wall-clock seconds spent building the shared desk-scale tables
BUILD_SECONDS: dict[str, float] = {}


def _timed(name, fn, *args):
    start = time.perf_counter()
    out = fn(*args)
    BUILD_SECONDS[name] = time.perf_counter() - start
    return out


@pytest.fixture(scope="session")
def tables_small():
    return build_tables(SMALL + 1)


@pytest.fixture(scope="session")
def delta_small():
    return delta_coefficients(SMALL)


@pytest.fixture(scope="session")
def tables_desk():
    return _timed("tables", build_tables, DESK + 1)


@pytest.fixture(scope="session")
def delta_desk():
    return _timed("delta", delta_coefficients, DESK)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
