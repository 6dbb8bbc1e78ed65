import numpy as np
import pytest

BELL = np.array([[0.5, 0.5], [0.5, 0.5]])
# [[3/4, sqrt(3)/4], [sqrt(3)/4, 1/4]]: rank one, unequal diagonal
SKEW = np.array([[0.75, np.sqrt(3) / 4], [np.sqrt(3) / 4, 0.25]])


def random_density(dim, rng, rank=None):
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_hermitian(dim, rng):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return g + g.conj().T


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


# filled by test_acceptance, one line per criterion
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
