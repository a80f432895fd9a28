import numpy as np
import pytest

from qrvlab.linalg import State


def random_hermitian(rng, dim, scale=1.0):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (m + m.conj().T) / 2


def random_unitary(rng, dim):
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_state(rng, dim, factor_dims=None):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return State.from_vector(v, factor_dims)


def random_observable(rng, dim, levels=None):
    """Hermitian matrix in a random basis; ``levels`` forces a degenerate integer spectrum."""
    u = random_unitary(rng, dim)
    if levels is None:
        spec = rng.normal(size=dim)
    else:
        spec = rng.integers(-levels, levels + 1, size=dim).astype(float)
    return u @ np.diag(spec) @ u.conj().T


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line[1])
