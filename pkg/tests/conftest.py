import numpy as np
import pytest

from cvgauss.states import ModePartition
from cvgauss.symplectic import random_symplectic


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def ab():
    return ModePartition.from_string("AB")


def random_valid_cov(n, rng, nu_max=2.5, scale=0.6):
    """Random valid covariance matrix: thermal core through a random symplectic."""
    s = random_symplectic(n, rng, scale=scale)
    nus = rng.uniform(1.0, nu_max, n)
    return s @ np.diag(np.repeat(nus, 2)) @ s.T


def random_pure_cov(n, rng, scale=0.6):
    s = random_symplectic(n, rng, scale=scale)
    return s @ s.T


def rotation2(phi):
    return np.array([[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]])
