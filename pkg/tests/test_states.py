"""Tests for states, tangent vectors and seeded generators."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from petz_geometry.core.errors import ConditioningError, DimensionMismatchError, NotHermitianError
from petz_geometry.core.models import DensityState, TangentKind, TangentVector
from petz_geometry.core.states import (
    density_state,
    derive_seed,
    dilation_field,
    expectation,
    immerse,
    positive_operator,
    project_to_states,
    random_density,
    random_gl,
    random_isometry,
    random_positive,
    random_tangent,
    random_unitary,
    tangent_matrix,
    tangent_project,
)


class TestConstructors:
    """Test the validating constructors."""

    def test_density_state(self, qubit_state):
        assert isinstance(qubit_state, DensityState)
        assert_allclose(qubit_state.spectrum.eigenvalues, [0.3, 0.7])

    def test_unit_trace_required(self):
        """A positive matrix with trace 2 is not a state."""
        with pytest.raises(DimensionMismatchError):
            density_state(np.diag([1.0, 1.0]))

    def test_positivity_floor(self):
        """A singular matrix is ill-conditioned."""
        with pytest.raises(ConditioningError) as excinfo:
            positive_operator(np.diag([1.0, 0.0]))
        assert excinfo.value.value == 0.0

    def test_not_hermitian(self):
        with pytest.raises(NotHermitianError):
            positive_operator(np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_matrix_is_read_only(self, qubit_state):
        """Stored arrays are immutable."""
        with pytest.raises(ValueError):
            qubit_state.matrix[0, 0] = 1.0


class TestProjection:
    """Test the projection and the immersion between P(H) and S(H)."""

    def test_project_to_states(self):
        omega = positive_operator(np.diag([2.0, 6.0]))
        rho = project_to_states(omega)
        assert_allclose(rho.matrix, np.diag([0.25, 0.75]))
        assert_allclose(rho.spectrum.eigenvalues, [0.25, 0.75])

    def test_immerse_keeps_matrix(self, qubit_state):
        omega = immerse(qubit_state)
        assert not isinstance(omega, DensityState)
        assert_allclose(omega.matrix, qubit_state.matrix)

    def test_expectation(self, qubit_state, pauli):
        """<z> at diag(0.7, 0.3) is 0.4."""
        assert expectation(pauli[2], qubit_state) == pytest.approx(0.4)

    def test_dilation_field(self, cone_point):
        assert_allclose(dilation_field(cone_point).matrix, cone_point.matrix)


class TestTangents:
    """Test tangent vectors at states and at cone points."""

    def test_tangent_project_is_traceless(self, state):
        v = tangent_project(np.eye(state.dim) + np.diag(np.arange(state.dim)), state)
        assert abs(np.trace(v.matrix)) < 1e-12
        assert v.kind is TangentKind.STATE

    def test_random_tangent_traceless(self, state, rng):
        assert abs(np.trace(random_tangent(state, rng).matrix)) < 1e-12

    def test_traced_vector_rejected_at_state(self, qubit_state):
        with pytest.raises(DimensionMismatchError):
            tangent_matrix(np.eye(2), qubit_state)

    def test_cone_vector_rejected_at_state(self, qubit_state, pauli):
        with pytest.raises(DimensionMismatchError):
            tangent_matrix(TangentVector(pauli[2], TangentKind.CONE), qubit_state)

    def test_any_hermitian_at_cone_point(self, qubit_state):
        """The trace is unconstrained on P(H)."""
        omega = immerse(qubit_state)
        assert_allclose(tangent_matrix(np.eye(2), omega), np.eye(2))


class TestGenerators:
    """Test seeded random generators."""

    def test_derive_seed_is_stable(self):
        assert derive_seed(7, "gradient", 2, 0.5, 0) == derive_seed(7, "gradient", 2, 0.5, 0)
        assert derive_seed(7, "gradient", 2, 0.5, 0) != derive_seed(7, "gradient", 2, 0.5, 1)

    def test_random_density_reproducible(self):
        assert np.array_equal(random_density(3, 42).matrix, random_density(3, 42).matrix)

    def test_random_density_is_faithful(self, state):
        assert state.spectrum.eigenvalues[0] > 0
        assert np.sum(state.spectrum.eigenvalues) == pytest.approx(1.0, abs=1e-12)

    def test_random_density_needs_two_levels(self):
        with pytest.raises(DimensionMismatchError):
            random_density(1, 0)

    def test_random_positive_trace_range(self, cone_point):
        assert 0.5 - 1e-12 <= cone_point.trace <= 2.0 + 1e-12

    @pytest.mark.parametrize("n", [2, 4])
    def test_random_unitary(self, n):
        u = random_unitary(n, 3)
        assert_allclose(u.conj().T @ u, np.eye(n), atol=1e-12)

    def test_random_isometry(self):
        v = random_isometry(6, 3, 1)
        assert_allclose(v.conj().T @ v, np.eye(3), atol=1e-12)

    def test_random_gl_is_well_conditioned(self):
        s = np.linalg.svd(random_gl(3, 2), compute_uv=False)
        assert s.min() >= 0.5 - 1e-12
        assert s.max() <= 2.0 + 1e-12
