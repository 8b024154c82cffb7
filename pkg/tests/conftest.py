import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tsmp.fixtures import example_graph
from tsmp.synthetic import SyntheticSpec, generate_synthetic

MINIFEED = Path(__file__).resolve().parents[1] / "src" / "tsmp" / "data" / "minifeed"

# 300-stop network; used by most oracle comparisons
SMALL_SPEC = SyntheticSpec(vertex_count=300, line_count=40, stops_per_line=20, seed=1)
# medium-scale network (3,616 stops)
MG_SPEC = SyntheticSpec(vertex_count=3616, line_count=300, stops_per_line=30, seed=1)


@pytest.fixture
def fixture_graph():
    return example_graph()


@pytest.fixture(scope="session")
def small_graph():
    return generate_synthetic(SMALL_SPEC)


@pytest.fixture(scope="session")
def mg_graph():
    return generate_synthetic(MG_SPEC)


@pytest.fixture(scope="session")
def minifeed_dir():
    return MINIFEED


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
