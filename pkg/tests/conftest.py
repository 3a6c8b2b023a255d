import numpy as np
import pytest

from mgb.graph import Graph, make_split
from mgb.synth import generate_synthetic


@pytest.fixture(scope="session")
def synthetic():
    return generate_synthetic(seed=0)


@pytest.fixture(scope="session")
def synthetic_split(synthetic):
    return make_split(synthetic, seed=0)


def path_graph(n, d=2, seed=0, labels=None):
    rng = np.random.default_rng(seed)
    y = np.arange(n) % 2 if labels is None else labels
    return Graph(rng.normal(size=(n, d)), y, [(i, i + 1) for i in range(n - 1)])


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
