import numpy as np
import pytest

from emocause.embeddings import EmbeddingTable
from emocause.nn import kernels

# pass/fail lines recorded by the acceptance tests, echoed after the run
# (prints inside tests are swallowed by capture unless -s is given)
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile the jitted kernels once so per-test timing stays honest
    kernels.warmup()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_table(rng, n_words: int, dim: int, prefix: str = "w") -> EmbeddingTable:
    return EmbeddingTable([f"{prefix}{i}" for i in range(n_words)],
                          rng.normal(size=(n_words, dim)))
