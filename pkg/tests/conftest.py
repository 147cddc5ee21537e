import numpy as np
import pytest

from seqswarm.errors import GraphError
from seqswarm.graph import atm_fixture, build_graph

TABLE2_PATHS = [
    "1,2,7,8",
    "1,2,3,7,8",
    "1,2,3,5,7",
    "1,2,3,4,7",
    "1,2,3,5,6,7",
    "1,2,4,8",
]

ACCEPTANCE_LINES: dict[str, str] = {}


class ScriptedRng:
    """Stand-in rng whose ``random()`` replays a fixed script."""

    def __init__(self, values):
        self.values = list(values)

    def random(self, size=None):
        if size is not None:
            raise TypeError("scripted rng only yields scalars")
        if not self.values:
            raise AssertionError("scripted rng exhausted")
        return self.values.pop(0)


class ConstantRng:
    def __init__(self, value):
        self.value = value

    def random(self, size=None):
        return self.value if size is None else np.full(size, self.value)


@pytest.fixture
def atm():
    return atm_fixture()


@pytest.fixture
def chain():
    return build_graph([(1, 2), (2, 3)], start=1, exits=[3])


@pytest.fixture
def star():
    return build_graph([(1, 2), (1, 3), (1, 4)], start=1, exits=[2, 3, 4])


def random_graph(rng: np.random.Generator, max_nodes: int = 9):
    """A random valid graph: a spine 1..n plus random extra edges (cycles allowed)."""
    while True:
        n = int(rng.integers(2, max_nodes + 1))
        edges = {(i, i + 1) for i in range(1, n)}
        for _ in range(int(rng.integers(0, 2 * n))):
            a, b = (int(x) for x in rng.integers(1, n + 1, size=2))
            if a != b and b != 1:
                edges.add((a, b))
        exits = {n} | {int(x) for x in rng.integers(2, n + 1, size=int(rng.integers(0, 3)))}
        try:
            return build_graph(sorted(edges), start=1, exits=exits, n=n)
        except GraphError:
            continue


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: int(k.split()[0])):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
