"""Tests for group actions and their fundamental vector fields."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from petz_geometry.core.actions import (
    ACTIONS,
    BetaKappaAction,
    GammaKappaAction,
    act_alpha,
    act_beta,
    act_beta_hat,
    act_beta_kappa,
    act_gamma_hat,
    act_gamma_kappa,
    act_zeta,
    compose_cotangent,
    cotangent_element,
    flow_fundamental_numeric,
    fund_W,
    fund_W_hat,
    fund_W_phi,
    fund_X,
    fund_Y,
    fund_Y_hat,
    fund_Z_phi,
    fund_Z_phi_hat,
    get_action,
    gl_curve,
    phi_related_field,
    transitive_element,
    vector_field_bracket,
)
from petz_geometry.core.errors import (
    ConditioningError,
    DomainError,
    UnsupportedVariantError,
)
from petz_geometry.core.functions import parse_spec
from petz_geometry.core.metric import gradient_field
from petz_geometry.core.models import (
    CotangentElement,
    DensityState,
    GLElement,
    LieDirection,
    MetricSpec,
    MonotoneFunctionSpec,
)
from petz_geometry.core.spectral import comm, matrix_exp, matrix_log
from petz_geometry.core.states import (
    expectation,
    immerse,
    positive_operator,
    project_to_states,
    random_density,
    random_hermitian,
    random_positive,
    random_unitary,
)


def _point_for(name, n, rng):
    if name == "zeta":
        return random_hermitian(n, rng)
    if name in ("beta-hat", "gamma-hat"):
        return random_positive(n, rng)
    return random_density(n, rng)


def _m(x):
    return np.asarray(x.matrix if hasattr(x, "matrix") else x)


class TestActions:
    """Test the actions on points."""

    def test_alpha_keeps_kind(self, state, rng):
        moved = act_alpha(random_unitary(state.dim, rng), state)
        assert isinstance(moved, DensityState)
        assert sum(moved.spectrum.eigenvalues) == pytest.approx(1.0, abs=1e-12)

    def test_alpha_rejects_non_unitary(self, qubit_state):
        with pytest.raises(DomainError):
            act_alpha(2 * np.eye(2), qubit_state)

    def test_beta_hat_is_congruence(self, cone_point, rng):
        g = ACTIONS["beta-hat"]().random_element(cone_point.dim, rng)
        omega = _m(cone_point)
        expected = g.matrix @ omega @ g.matrix.conj().T
        assert_allclose(act_beta_hat(g, cone_point).matrix, expected, atol=1e-12)

    def test_singular_element_rejected(self, qubit_state):
        with pytest.raises(ConditioningError):
            act_beta(np.diag([1.0, 0.0]), qubit_state)

    def test_beta_kappa_at_one_is_beta(self, state, rng):
        g = ACTIONS["beta"]().random_element(state.dim, rng)
        assert_allclose(act_beta_kappa(g, state, 1.0).matrix, act_beta(g, state).matrix, atol=1e-11)

    @pytest.mark.parametrize("kappa", [0.25, 0.5, 1.0])
    def test_restriction_to_unitaries(self, state, rng, kappa):
        """beta-kappa and gamma-kappa reduce to conjugation on U(H)."""
        u = random_unitary(state.dim, rng)
        reference = act_alpha(u, state).matrix
        assert_allclose(act_beta_kappa(u, state, kappa).matrix, reference, atol=1e-10)
        zero = CotangentElement(u, np.zeros_like(u))
        assert_allclose(act_gamma_kappa(zero, state, kappa).matrix, reference, atol=1e-10)

    def test_zeta_conjugates_gamma_hat(self, cone_point, rng):
        """gamma-hat(e, omega) = exp(zeta(e, ln omega))."""
        e = ACTIONS["gamma-hat"]().random_element(cone_point.dim, rng)
        expected = matrix_exp(act_zeta(e, matrix_log(cone_point.spectrum)))
        assert_allclose(act_gamma_hat(e, cone_point).matrix, expected, atol=1e-10)

    def test_beta_intertwines_projection(self, cone_point, rng):
        """beta(g, pi(omega)) = pi(beta-hat(g, omega))."""
        g = ACTIONS["beta"]().random_element(cone_point.dim, rng)
        lhs = act_beta(g, project_to_states(cone_point)).matrix
        rhs = project_to_states(act_beta_hat(g, cone_point)).matrix
        assert_allclose(lhs, rhs, atol=1e-12)

    def test_transitivity_at_kappa_one(self, dim, rng):
        sigma = random_density(dim, rng)
        target = random_density(dim, rng)
        moved = act_beta(transitive_element(sigma, target), sigma)
        assert_allclose(moved.matrix, target.matrix, atol=1e-10)

    def test_cotangent_element_validation(self):
        with pytest.raises(DomainError):
            cotangent_element(2 * np.eye(2), np.eye(2))

    def test_deformation_must_be_positive(self):
        with pytest.raises(ValueError):
            BetaKappaAction(0.0)


class TestGroupLaws:
    """Test identity and composition for every registered action."""

    @pytest.mark.parametrize("name", sorted(ACTIONS))
    def test_identity(self, name, rng):
        action = get_action(name, 0.5)
        x = _point_for(name, 3, rng)
        assert_allclose(_m(action.act(action.identity(3), x)), _m(x), atol=1e-12)

    @pytest.mark.parametrize("name", sorted(ACTIONS))
    def test_composition(self, name, rng):
        action = get_action(name, 0.5)
        x = _point_for(name, 3, rng)
        g = action.random_element(3, rng)
        h = action.random_element(3, rng)
        lhs = action.act(g, action.act(h, x))
        rhs = action.act(action.compose(g, h), x)
        assert_allclose(_m(lhs), _m(rhs), atol=1e-10)

    def test_cotangent_composition_law(self, rng):
        first = ACTIONS["zeta"]().random_element(2, rng)
        second = ACTIONS["zeta"]().random_element(2, rng)
        product = compose_cotangent(first, second)
        u1 = first.unitary
        assert_allclose(product.unitary, u1 @ second.unitary)
        assert_allclose(product.a, first.a + u1 @ second.a @ u1.conj().T, atol=1e-14)

    def test_unknown_action(self):
        with pytest.raises(UnsupportedVariantError):
            get_action("delta")


class TestFundamentalFields:
    """Test closed-form fields against the flows they generate."""

    @pytest.mark.parametrize("name", sorted(ACTIONS))
    def test_analytic_matches_flow(self, name, rng):
        action = get_action(name, 0.5)
        x = _point_for(name, 3, rng)
        b = random_hermitian(3, rng)
        a = np.zeros_like(b) if name == "alpha" else random_hermitian(3, rng)
        direction = LieDirection(a, b)
        numeric = flow_fundamental_numeric(action, direction, x)
        analytic = action.analytic_field(direction, x)
        assert_allclose(numeric.matrix, analytic.matrix, atol=1e-6 * (1 + np.abs(analytic.matrix).max()))

    def test_richardson_is_closer(self, state, rng):
        action = BetaKappaAction(0.5)
        direction = LieDirection.along_a(random_hermitian(state.dim, rng))
        analytic = action.analytic_field(direction, state).matrix
        plain = flow_fundamental_numeric(action, direction, state, h=1e-3).matrix
        refined = flow_fundamental_numeric(action, direction, state, h=1e-3, richardson=True).matrix
        assert np.abs(refined - analytic).max() < np.abs(plain - analytic).max()

    @pytest.mark.parametrize("h", [1e-8, 1e-2])
    def test_step_range(self, qubit_state, h, pauli):
        with pytest.raises(DomainError):
            flow_fundamental_numeric(ACTIONS["beta"](), LieDirection.along_a(pauli[2]), qubit_state, h=h)

    def test_alpha_rejects_a_direction(self, qubit_state, pauli):
        with pytest.raises(DomainError):
            ACTIONS["alpha"]().analytic_field(LieDirection.along_a(pauli[0]), qubit_state)

    def test_gl_curve_unitary_branch(self, pauli):
        """(0, b) gives exp(-itb/2)."""
        g = gl_curve(LieDirection.along_b(pauli[2]), 0.4)
        assert_allclose(g, np.diag(np.exp([-0.2j, 0.2j])), atol=1e-14)

    def test_fund_X_qubit(self, qubit_state, pauli):
        """[rho, x] at diag(0.7, 0.3)."""
        rho = np.diag([0.7, 0.3])
        expected = 0.5j * (rho @ pauli[0] - pauli[0] @ rho)
        assert_allclose(fund_X(pauli[0], qubit_state).matrix, expected, atol=1e-14)

    @pytest.mark.parametrize("kappa", [0.25, 0.5, 0.75, 1.0])
    def test_gradient_equals_Z_phi(self, state, rng, kappa):
        """grad l_a for kappa * G_{f_kappa} is the state part of Z_phi."""
        a = random_hermitian(state.dim, rng)
        grad = gradient_field(MetricSpec(MonotoneFunctionSpec.gl(kappa), prefactor=kappa), a, state)
        assert_allclose(grad.matrix, fund_Z_phi(a, state, kappa).matrix, atol=1e-10)

    @pytest.mark.parametrize("kappa", [0.5, 1.0, 2.0])
    def test_bkm_gradient_equals_W_phi(self, state, rng, kappa):
        """grad l_a for kappa * G_BKM is W_a / kappa."""
        a = random_hermitian(state.dim, rng)
        grad = gradient_field(MetricSpec(MonotoneFunctionSpec.bkm(), prefactor=kappa), a, state)
        assert_allclose(grad.matrix, fund_W_phi(a, state, kappa).matrix, atol=1e-10)

    def test_bures_helstrom_is_Y(self, state, rng):
        """At kappa = 1 the deformed field is the anticommutator field."""
        a = random_hermitian(state.dim, rng)
        assert_allclose(fund_Z_phi(a, state, 1.0).matrix, fund_Y(a, state).matrix, atol=1e-12)

    @pytest.mark.parametrize("kappa", [0.25, 0.5, 2.0])
    def test_phi_relatedness(self, cone_point, rng, kappa):
        a = random_hermitian(cone_point.dim, rng)
        assert_allclose(
            fund_Z_phi_hat(a, cone_point, kappa).matrix,
            phi_related_field(a, cone_point, kappa).matrix,
            atol=1e-10,
        )

    def test_i_relatedness(self, state, rng):
        """Y_a = Y-hat_a - l_a Delta and W_a = W-hat_a - l_a Delta along the immersion."""
        a = random_hermitian(state.dim, rng)
        omega = immerse(state)
        l_a = expectation(a, state)
        assert_allclose(fund_Y(a, state).matrix, fund_Y_hat(a, omega).matrix - l_a * omega.matrix, atol=1e-12)
        assert_allclose(fund_W(a, state).matrix, fund_W_hat(a, omega).matrix - l_a * omega.matrix, atol=1e-12)

    def test_W_hat_degenerate_point(self):
        """At a multiple of the identity W-hat_a = omega a."""
        omega = positive_operator(0.5 * np.eye(2))
        a = np.array([[1.0, 2.0], [2.0, -1.0]])
        assert_allclose(fund_W_hat(a, omega).matrix, 0.5 * a, atol=1e-14)

    def test_gamma_kappa_field(self, state, rng):
        action = GammaKappaAction(0.5)
        direction = LieDirection.along_a(random_hermitian(state.dim, rng))
        numeric = flow_fundamental_numeric(action, direction, state, richardson=True)
        assert_allclose(numeric.matrix, 2 * fund_W(direction.a, state).matrix, atol=1e-7)


class TestBrackets:
    """Test vector field brackets by nested central differences."""

    def test_X_X(self, state, rng):
        b = random_hermitian(state.dim, rng)
        c = random_hermitian(state.dim, rng)
        bracket = vector_field_bracket(lambda x: fund_X(b, x), lambda x: fund_X(c, x), state)
        assert_allclose(bracket, fund_X(comm(b, c), state).matrix, atol=1e-6)

    def test_Y_hat_Y_hat(self, cone_point, rng):
        """[Y_a, Y_b] = X_[b,a] on the cone."""
        a = random_hermitian(cone_point.dim, rng)
        b = random_hermitian(cone_point.dim, rng)
        bracket = vector_field_bracket(lambda x: fund_Y_hat(a, x), lambda x: fund_Y_hat(b, x), cone_point)
        assert_allclose(bracket, fund_X(comm(b, a), cone_point).matrix, atol=1e-6)

    @pytest.mark.parametrize("text", ["bh", "wy", "bkm"])
    def test_X_gradient(self, text, rng, dim):
        """[X_b, grad l_c] = grad l_[b,c]."""
        rho = random_density(dim, rng)
        m = MetricSpec(parse_spec(text))
        b = random_hermitian(dim, rng)
        c = random_hermitian(dim, rng)
        bracket = vector_field_bracket(lambda x: fund_X(b, x), lambda x: gradient_field(m, c, x), rho)
        expected = gradient_field(m, comm(b, c), rho).matrix
        scale = 1 + np.linalg.norm(expected, 2)
        assert np.linalg.norm(bracket - expected, 2) / scale < 1e-5

    def test_gl_element_wrapper(self, qubit_state):
        g = GLElement(np.diag([2.0, 1.0]))
        moved = act_beta(g, qubit_state)
        assert_allclose(moved.matrix, np.diag([2.8, 0.3]) / 3.1, atol=1e-14)
