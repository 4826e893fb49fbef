"""Fixtures for tests."""

import numpy as np
import pytest

from petz_geometry.core.states import density_state, make_rng, random_density, random_positive

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


@pytest.fixture
def pauli():
    """Pauli matrices x, y, z."""
    return SIGMA_X, SIGMA_Y, SIGMA_Z


@pytest.fixture
def rng():
    """Seeded generator, fresh per test."""
    return make_rng(12345)


@pytest.fixture
def qubit_state():
    """diag(0.7, 0.3) in the computational basis."""
    return density_state(np.diag([0.7, 0.3]))


@pytest.fixture
def maximally_mixed():
    return density_state(np.eye(3) / 3)


@pytest.fixture(params=[2, 3, 4])
def dim(request):
    return request.param


@pytest.fixture
def state(dim, rng):
    """Random faithful state of the parametrized dimension."""
    return random_density(dim, rng)


@pytest.fixture
def cone_point(dim, rng):
    """Random point of the positive cone of the parametrized dimension."""
    return random_positive(dim, rng)
