import pytest

from commclass.branch import build_branch_graph
from commclass.field import fq_make

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def F2():
    return fq_make(2)


@pytest.fixture(scope="session")
def F3():
    return fq_make(3)


_GRAPHS = {}


def get_graph(n, q, workers=1):
    key = (n, q, workers)
    if key not in _GRAPHS:
        _GRAPHS[key] = build_branch_graph(n, fq_make(q), workers=workers)
    return _GRAPHS[key]


@pytest.fixture(scope="session")
def graph():
    return get_graph


@pytest.fixture(scope="session")
def acceptance_log():
    def log(criterion, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return log


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
