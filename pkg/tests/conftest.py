import math

import pytest

from backflow import Environment, GaussianSuperposition, PhysicalConstants

# Reference scenario used throughout: two momentum-space Gaussians with
# negligible negative-momentum content and near-maximal interference.
SIGMA_P = 0.05
P0A = 1.4
P0B = 0.3
ALPHA = 1.9
THETA = math.pi


@pytest.fixture(scope="session")
def constants():
    return PhysicalConstants(m=1.0, hbar=1.0, epsilon=1.0)


@pytest.fixture(scope="session")
def superposition():
    return GaussianSuperposition.from_momenta(SIGMA_P, P0A, P0B, ALPHA, THETA)


@pytest.fixture(scope="session")
def single_gaussian():
    return GaussianSuperposition.single(SIGMA_P, P0A)


@pytest.fixture()
def free_env():
    return Environment(gamma=0.0, kT=0.0, g=0.0)
