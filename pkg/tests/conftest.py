import pytest

from medraw.graphgen import Graph, LayoutGraph
from medraw.scheduler import MorphParams

_criteria = {}


@pytest.fixture
def two_edges():
    """Two length-100 edges crossing at parameter 0.4 on both."""
    g = Graph(4, ((0, 1), (2, 3)))
    return LayoutGraph(g, [(0, 0), (100, 0), (40, -40), (40, 60)])


@pytest.fixture
def worked_params():
    return MorphParams(delta=0.25, eta=0.5, speed=50.0, min_travel_s=0.0)


@pytest.fixture
def fig2():
    """One long edge (2) crossed in its blank area by two disjoint short edges."""
    g = Graph(6, ((0, 1), (2, 3), (4, 5)))
    return LayoutGraph(g, [(120, -40), (120, 60), (280, -40), (280, 60), (0, 0), (400, 0)])


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        _criteria[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_criteria.items()):
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{mark}  {name}")
