import warnings

import numpy as np
import pytest

from subradiant.evolution import log_time_grid, spectral_propagate
from subradiant.lindblad import liouvillian_for
from subradiant.system import SystemParams, ket, projector

MAIN = SystemParams()
EE = projector(ket("ee"))


@pytest.fixture(scope="session")
def main_params():
    return MAIN


@pytest.fixture(scope="session")
def main_trajectory():
    """|ee> start, resonant defaults, 1..1e10 at 20 points per decade."""
    times = log_time_grid(1.0, 1e10, 20)
    return spectral_propagate(liouvillian_for(MAIN), EE, times)


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


def random_density_matrix(rng, dim=4, rank=None):
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(rng, dim):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def quiet(func, *args, **kwargs):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return func(*args, **kwargs)


def pytest_terminal_summary(terminalreporter):
    module = __import__("sys").modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
