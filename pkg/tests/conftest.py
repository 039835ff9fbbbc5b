import numpy as np
import pytest

from kpii_ist.forward import InitialData, build_scattering_grid
from kpii_ist.lattice import Lattice2D

DESK_AMPLITUDE = 0.0025  # eps0 = max(Linf, L1) = 0.01 for width 2
DESK_WIDTH = 2.0


@pytest.fixture(scope="session")
def desk_lattice():
    return Lattice2D.square(16.0, 64)


@pytest.fixture(scope="session")
def spectral_lattice():
    return Lattice2D.square(2.5, 32)


@pytest.fixture(scope="session")
def desk_datum(desk_lattice):
    return InitialData.gaussian(desk_lattice, DESK_AMPLITUDE, DESK_WIDTH)


@pytest.fixture(scope="session")
def desk_grid(desk_datum, spectral_lattice):
    return build_scattering_grid(desk_datum, spectral_lattice)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# criterion number -> (passed, detail); filled by test_acceptance, printed at the end of the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"CRITERION {n:2d} {'PASS' if ok else 'FAIL'}  {detail}")
