import math

import numpy as np
import pytest

from isofokker import (
    build_chain,
    build_hamiltonian,
    make_grid,
    ou_scenario,
    sample,
    solve_spectrum,
)


@pytest.fixture(scope="session")
def ou_grid():
    return make_grid(-12.0, 12.0, 2001)


@pytest.fixture(scope="session")
def ou_drift(ou_grid):
    return ou_scenario(ou_grid)


@pytest.fixture(scope="session")
def ou_spectrum(ou_grid, ou_drift):
    return solve_spectrum(build_hamiltonian(ou_drift.W), 7)


@pytest.fixture(scope="session")
def ou_chain3(ou_spectrum):
    return build_chain(ou_spectrum, 3)


@pytest.fixture(scope="session")
def gaussian_ic(ou_grid):
    """Unit-mass Gaussian, mean 2, variance 1/2, on the OU grid."""
    return sample(ou_grid, lambda x: np.exp(-((x - 2.0) ** 2)) / math.sqrt(math.pi))


def align_sign(candidate, reference):
    """Flip candidate's sign to best match reference (states are defined up to sign)."""
    dot = float(candidate.values @ reference.values)
    return -candidate if dot < 0 else candidate
