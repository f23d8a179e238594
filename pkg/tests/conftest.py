import numpy as np
import pytest

from markov_clt.chain import build_chain, make_example

ACCEPTANCE_LINES = []


def corpus(count=100, n_max=15):
    """Deterministic mix of reversible and general random chains."""
    out = []
    for seed in range(count):
        n = 2 + seed % (n_max - 1)
        fam = "random_reversible" if seed % 2 == 0 else "random_general"
        out.append(make_example(fam, n, seed=seed))
    return out


@pytest.fixture(scope="session")
def c2():
    return make_example("two_state", 1, 1)


@pytest.fixture(scope="session")
def c3():
    return make_example("cycle_drift", 3)


@pytest.fixture(scope="session")
def c_asym():
    """pi = (1/3, 2/3)."""
    chain = build_chain([[-2.0, 2.0], [1.0, -1.0]])
    return chain, np.array([2.0 / 3.0, -1.0 / 3.0])


@pytest.fixture(scope="session")
def random_chains():
    return corpus(100)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
