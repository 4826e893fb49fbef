"""
Group actions of GL(H), U(H) and T*U(H) on P(H), S(H) and B_sa(H).

Each action comes with its fundamental vector fields in closed form (eigenbasis
tables) and numerically, as central differences along one-parameter curves.
GL directions (a, b) use the curve g(t) = exp(t(a - ib)/2); cotangent directions
use (exp(-itb/2), t a).
"""

from abc import ABC, abstractmethod
from collections.abc import Callable

import numpy as np
from scipy.linalg import expm

from ..config import config
from ..logging_config import get_logger
from .errors import ConditioningError, DimensionMismatchError, DomainError, UnsupportedVariantError
from .models import (
    ComplexMatrix,
    CotangentElement,
    DeformationParam,
    DensityState,
    GLElement,
    LieDirection,
    PositiveOperator,
    RealTable,
    SpectralDecomposition,
    TangentKind,
    TangentVector,
)
from .spectral import (
    anticomm,
    comm,
    first_divided_difference,
    hermitian,
    hermitian_eig,
    is_unitary,
    matrix_log,
    matrix_power,
    schur_product,
    spectral_map,
    symmetrize,
)
from .states import (
    Seed,
    density_state,
    expectation,
    immerse,
    make_rng,
    observable_matrix,
    positive_operator,
    project_to_states,
    random_gl,
    random_hermitian,
    random_unitary,
)

logger = get_logger(__name__)

GL_SINGULAR_FLOOR = 1e-10
UNITARY_ATOL = 1e-10


# ---------------------------------------------------------------------------
# Group elements
# ---------------------------------------------------------------------------


def as_gl(g) -> ComplexMatrix:
    """
    Matrix of a GL(H) element.

    Raises:
        ConditioningError: if the smallest singular value is not above 1e-10
    """
    matrix = np.asarray(g.matrix if isinstance(g, GLElement) else g, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatchError(f"Group element must be square, got shape {matrix.shape}")
    smallest = float(np.linalg.svd(matrix, compute_uv=False)[-1])
    if smallest <= GL_SINGULAR_FLOOR:
        raise ConditioningError(smallest, f"Group element is singular (sigma_min = {smallest:.3e})")
    return matrix


def as_unitary(u) -> ComplexMatrix:
    matrix = np.asarray(u, dtype=np.complex128)
    if not is_unitary(matrix, UNITARY_ATOL):
        raise DomainError(float("nan"), "Matrix is not unitary within 1e-10")
    return matrix


def cotangent_element(unitary, a) -> CotangentElement:
    """Validated element (U, a) of T*U(H)."""
    u = as_unitary(unitary)
    a = hermitian(a)
    if a.shape != u.shape:
        raise DimensionMismatchError(f"U is {u.shape}, a is {a.shape}")
    return CotangentElement(u, a)


_warned_kappas: set[float] = set()


def deformation(kappa: float | DeformationParam) -> float:
    """Validated kappa; warns once per value outside the monotone range."""
    param = kappa if isinstance(kappa, DeformationParam) else DeformationParam(float(kappa))
    if param.exceeds_monotone_range and param.kappa not in _warned_kappas:
        _warned_kappas.add(param.kappa)
        logger.warning(f"kappa={param.kappa} is outside (0, 1]: the deformed metric is not monotone")
    return param.kappa


def compose_gl(g, h) -> GLElement:
    return GLElement(as_gl(g) @ as_gl(h))


def compose_cotangent(first: CotangentElement, second: CotangentElement) -> CotangentElement:
    """(U1, a1)(U2, a2) = (U1 U2, a1 + U1 a2 U1^dagger)."""
    u1 = np.asarray(first.unitary)
    return CotangentElement(
        u1 @ np.asarray(second.unitary),
        symmetrize(np.asarray(first.a) + u1 @ np.asarray(second.a) @ u1.conj().T),
    )


def transitive_element(sigma: DensityState, sigma_prime: DensityState) -> GLElement:
    """g = sigma'^{1/2} sigma^{-1/2}, so that act_beta(g, sigma) = sigma'."""
    return GLElement(matrix_power(sigma_prime.spectrum, 0.5) @ matrix_power(sigma.spectrum, -0.5))


# ---------------------------------------------------------------------------
# Actions
# ---------------------------------------------------------------------------


def _same_kind(x: PositiveOperator, matrix: ComplexMatrix, spectrum: SpectralDecomposition):
    if isinstance(x, DensityState):
        return density_state(matrix, spectrum)
    return positive_operator(matrix, spectrum)


def act_alpha(u, x: PositiveOperator) -> PositiveOperator:
    """U x U^dagger, keeping the kind of ``x`` and rotating its eigenbasis."""
    u = as_unitary(u)
    spectrum = x.spectrum
    rotated = SpectralDecomposition(spectrum.eigenvalues, u @ spectrum.eigenvectors, spectrum.clusters)
    return _same_kind(x, symmetrize(u @ np.asarray(x.matrix) @ u.conj().T), rotated)


def act_beta_hat(g, omega: PositiveOperator) -> PositiveOperator:
    """Linear action g omega g^dagger on the cone."""
    g = as_gl(g)
    return positive_operator(symmetrize(g @ np.asarray(omega.matrix) @ g.conj().T))


def act_beta(g, rho: DensityState) -> DensityState:
    """Normalized action pi(g rho g^dagger)."""
    return project_to_states(act_beta_hat(g, immerse(rho)))


def act_beta_kappa(g, rho: DensityState, kappa: float | DeformationParam) -> DensityState:
    """normalize((g rho^kappa g^dagger)^{1/kappa})."""
    k = deformation(kappa)
    g = as_gl(g)
    powered = matrix_power(rho.spectrum, k)
    moved = positive_operator(symmetrize(g @ powered @ g.conj().T))
    back = spectral_map(moved.spectrum, lambda p: p ** (1.0 / k))
    return project_to_states(positive_operator(back.reconstruct(), back))


def act_gamma_hat(e: CotangentElement, omega: PositiveOperator) -> PositiveOperator:
    """exp(U ln(omega) U^dagger + a)."""
    u = np.asarray(e.unitary)
    exponent = symmetrize(u @ matrix_log(omega.spectrum) @ u.conj().T + np.asarray(e.a))
    spectrum = spectral_map(hermitian_eig(exponent), np.exp)
    return positive_operator(spectrum.reconstruct(), spectrum)


def act_zeta(e: CotangentElement, x) -> ComplexMatrix:
    """Affine action U x U^dagger + a on self-adjoint operators."""
    x = hermitian(x)
    u = np.asarray(e.unitary)
    if x.shape != u.shape:
        raise DimensionMismatchError(f"Element acts on {u.shape[0]}-dim operators, got {x.shape}")
    return symmetrize(u @ x @ u.conj().T + np.asarray(e.a))


def act_gamma_kappa(e: CotangentElement, rho: DensityState, kappa: float | DeformationParam) -> DensityState:
    """normalize(exp(U ln(rho) U^dagger + a/kappa))."""
    k = deformation(kappa)
    scaled = CotangentElement(e.unitary, np.asarray(e.a) / k)
    return project_to_states(act_gamma_hat(scaled, immerse(rho)))


# ---------------------------------------------------------------------------
# Fundamental vector fields
# ---------------------------------------------------------------------------


def _kind(x) -> TangentKind:
    return TangentKind.STATE if isinstance(x, DensityState) else TangentKind.CONE


def _state_part(field: ComplexMatrix, rho: DensityState) -> ComplexMatrix:
    return field - np.trace(field).real * np.asarray(rho.matrix)


def fund_X(b, x: PositiveOperator) -> TangentVector:
    """X_b(x) = [x, b]."""
    return TangentVector(symmetrize(comm(x.matrix, observable_matrix(b))), _kind(x))


def fund_Y_hat(a, omega: PositiveOperator) -> TangentVector:
    """Y_a(omega) = {omega, a} on the cone."""
    return TangentVector(symmetrize(anticomm(omega.matrix, observable_matrix(a))), TangentKind.CONE)


def fund_Y(a, rho: DensityState) -> TangentVector:
    """{rho, a} - rho Tr{rho, a}."""
    y = symmetrize(anticomm(rho.matrix, observable_matrix(a)))
    return TangentVector(_state_part(y, rho), TangentKind.STATE)


def _z_phi_table(spectrum: SpectralDecomposition, kappa: float) -> RealTable:
    """
    Entries (1/2)(phi_j + phi_k)(w_j - w_k)/(phi_j - phi_k) with phi = w^kappa,
    and w_j / kappa inside a degeneracy cluster.
    """
    p = spectrum.eigenvalues
    if p[0] <= 0:
        raise ConditioningError(float(p[0]), "Fundamental fields need a positive spectrum")
    u = np.log(p[:, None] / p[None, :])
    phi = p**kappa
    with np.errstate(all="ignore"):
        ratio = p[None, :] ** (1.0 - kappa) * np.expm1(u) / np.expm1(kappa * u)
    cross = 0.5 * (phi[:, None] + phi[None, :]) * ratio
    inner = (p[:, None] + p[None, :]) / (2.0 * kappa)
    table = np.where(spectrum.same_cluster(), inner, cross)
    return 0.5 * (table + table.T)


def _log_mean_table(spectrum: SpectralDecomposition) -> RealTable:
    """(p_j - p_k) / ln(p_j / p_k), p_j inside a cluster."""
    p = spectrum.eigenvalues
    if p[0] <= 0:
        raise ConditioningError(float(p[0]), "Fundamental fields need a positive spectrum")
    u = np.log(p[:, None] / p[None, :])
    with np.errstate(all="ignore"):
        cross = p[None, :] * np.expm1(u) / u
    table = np.where(spectrum.same_cluster(), 0.5 * (p[:, None] + p[None, :]), cross)
    return 0.5 * (table + table.T)


def fund_Z_phi_hat(a, omega: PositiveOperator, kappa: float | DeformationParam) -> TangentVector:
    """Fundamental field of the deformed GL action along (a, 0), on the cone."""
    k = deformation(kappa)
    table = _z_phi_table(omega.spectrum, k)
    return TangentVector(schur_product(table, observable_matrix(a), omega.spectrum), TangentKind.CONE)


def fund_Z_phi(a, rho: DensityState, kappa: float | DeformationParam) -> TangentVector:
    """State-space projection Z - Tr(Z) rho of :func:`fund_Z_phi_hat`."""
    z = np.asarray(fund_Z_phi_hat(a, rho, kappa).matrix)
    return TangentVector(_state_part(z, rho), TangentKind.STATE)


def phi_related_field(a, omega: PositiveOperator, kappa: float | DeformationParam) -> TangentVector:
    """
    T(phi^{-1}) Y_a(phi(omega)), the push-forward of Y_a through phi^{-1}.

    Computed from the divided differences of y -> y^{1/kappa} in the eigenbasis of omega^kappa,
    independently of the closed form in :func:`fund_Z_phi_hat`.
    """
    k = deformation(kappa)
    nu = spectral_map(omega.spectrum, lambda p: p**k)
    y = symmetrize(anticomm(nu.reconstruct(), observable_matrix(a)))
    table = first_divided_difference(
        nu, lambda q: q ** (1.0 / k), lambda q: (1.0 / k) * q ** (1.0 / k - 1.0)
    )
    return TangentVector(schur_product(table, y, nu), TangentKind.CONE)


def fund_W_hat(a, omega: PositiveOperator) -> TangentVector:
    """W_a(omega) = int_0^1 omega^s a omega^{1-s} ds, the BKM field on the cone."""
    table = _log_mean_table(omega.spectrum)
    return TangentVector(schur_product(table, observable_matrix(a), omega.spectrum), TangentKind.CONE)


def fund_W(a, rho: DensityState) -> TangentVector:
    """W_a(rho) - Tr(rho a) rho."""
    w = np.asarray(fund_W_hat(a, rho).matrix)
    return TangentVector(w - expectation(a, rho) * np.asarray(rho.matrix), TangentKind.STATE)


def fund_W_phi(a, rho: DensityState, kappa: float | DeformationParam) -> TangentVector:
    return TangentVector(np.asarray(fund_W(a, rho).matrix) / deformation(kappa), TangentKind.STATE)


# ---------------------------------------------------------------------------
# Curves and the action interface
# ---------------------------------------------------------------------------


def _is_zero(m) -> bool:
    return not np.any(np.asarray(m))


def unitary_curve(b, t: float) -> ComplexMatrix:
    """exp(-itb/2) through the eigendecomposition of b."""
    spectrum = hermitian_eig(b)
    v = spectrum.eigenvectors
    return (v * np.exp(-0.5j * t * spectrum.eigenvalues)) @ v.conj().T


def gl_curve(direction: LieDirection, t: float) -> ComplexMatrix:
    """g(t) = exp(t(a - ib)/2)."""
    a = np.asarray(direction.a)
    b = np.asarray(direction.b)
    if _is_zero(a):
        return unitary_curve(b, t)
    if _is_zero(b):
        spectrum = hermitian_eig(a)
        v = spectrum.eigenvectors
        return (v * np.exp(0.5 * t * spectrum.eigenvalues)) @ v.conj().T
    return expm(0.5 * t * (a - 1j * b))


class GroupAction(ABC):
    """A Lie group acting on a manifold of operators, probed along Lie algebra directions."""

    name: str = ""

    def __init__(self, kappa: float | DeformationParam = 1.0):
        self.kappa = deformation(kappa)

    @abstractmethod
    def act(self, element, x):
        """Apply a group element to a point."""

    @abstractmethod
    def curve(self, direction: LieDirection, t: float):
        """Group element at time t on the one-parameter curve generated by ``direction``."""

    @abstractmethod
    def identity(self, n: int):
        pass

    @abstractmethod
    def compose(self, first, second):
        pass

    @abstractmethod
    def random_element(self, n: int, seed: Seed):
        pass

    @abstractmethod
    def analytic_field(self, direction: LieDirection, x) -> TangentVector:
        """Closed-form fundamental vector field at ``x``."""

    def act_along(self, direction: LieDirection, t: float, x):
        return self.act(self.curve(direction, t), x)


class AlphaAction(GroupAction):
    """U(H) acting by conjugation; directions along b only."""

    name = "alpha"

    def act(self, element, x):
        return act_alpha(element, x)

    def curve(self, direction, t):
        if not _is_zero(direction.a):
            raise DomainError(float("nan"), "The unitary action only has directions (0, b)")
        return unitary_curve(direction.b, t)

    def identity(self, n):
        return np.eye(n, dtype=np.complex128)

    def compose(self, first, second):
        return as_unitary(first) @ as_unitary(second)

    def random_element(self, n, seed):
        return random_unitary(n, seed)

    def analytic_field(self, direction, x):
        if not _is_zero(direction.a):
            raise DomainError(float("nan"), "The unitary action only has directions (0, b)")
        return fund_X(direction.b, x)


class _GLAction(GroupAction):
    def curve(self, direction, t):
        return GLElement(gl_curve(direction, t))

    def identity(self, n):
        return GLElement(np.eye(n, dtype=np.complex128))

    def compose(self, first, second):
        return compose_gl(first, second)

    def random_element(self, n, seed):
        return GLElement(random_gl(n, seed))


class BetaHatAction(_GLAction):
    name = "beta-hat"

    def act(self, element, x):
        return act_beta_hat(element, x)

    def analytic_field(self, direction, x):
        field = fund_X(direction.b, x).matrix + fund_Y_hat(direction.a, x).matrix
        return TangentVector(field, TangentKind.CONE)


class BetaAction(_GLAction):
    name = "beta"

    def act(self, element, x):
        return act_beta(element, x)

    def analytic_field(self, direction, x):
        field = fund_X(direction.b, x).matrix + fund_Y(direction.a, x).matrix
        return TangentVector(field, TangentKind.STATE)


class BetaKappaAction(_GLAction):
    name = "beta-kappa"

    def act(self, element, x):
        return act_beta_kappa(element, x, self.kappa)

    def analytic_field(self, direction, x):
        field = fund_X(direction.b, x).matrix + fund_Z_phi(direction.a, x, self.kappa).matrix
        return TangentVector(field, TangentKind.STATE)


class _CotangentAction(GroupAction):
    def curve(self, direction, t):
        return CotangentElement(unitary_curve(direction.b, t), t * np.asarray(direction.a))

    def identity(self, n):
        return CotangentElement(np.eye(n, dtype=np.complex128), np.zeros((n, n), dtype=np.complex128))

    def compose(self, first, second):
        return compose_cotangent(first, second)

    def random_element(self, n, seed):
        rng = make_rng(seed)
        return CotangentElement(random_unitary(n, rng), random_hermitian(n, rng))


class GammaHatAction(_CotangentAction):
    name = "gamma-hat"

    def act(self, element, x):
        return act_gamma_hat(element, x)

    def analytic_field(self, direction, x):
        field = fund_X(direction.b, x).matrix + fund_W_hat(direction.a, x).matrix
        return TangentVector(field, TangentKind.CONE)


class GammaKappaAction(_CotangentAction):
    name = "gamma-kappa"

    def act(self, element, x):
        return act_gamma_kappa(element, x, self.kappa)

    def analytic_field(self, direction, x):
        field = fund_X(direction.b, x).matrix + fund_W_phi(direction.a, x, self.kappa).matrix
        return TangentVector(field, TangentKind.STATE)


class ZetaAction(_CotangentAction):
    """Affine action on B_sa(H); points are Hermitian matrices."""

    name = "zeta"

    def act(self, element, x):
        return act_zeta(element, x)

    def analytic_field(self, direction, x):
        x = hermitian(x)
        field = symmetrize(comm(x, direction.b)) + np.asarray(direction.a)
        return TangentVector(field, TangentKind.CONE)


ACTIONS: dict[str, type[GroupAction]] = {
    cls.name: cls
    for cls in (
        AlphaAction,
        BetaHatAction,
        BetaAction,
        BetaKappaAction,
        GammaHatAction,
        GammaKappaAction,
        ZetaAction,
    )
}


def get_action(name: str, kappa: float | DeformationParam = 1.0) -> GroupAction:
    """
    Look up an action by its CLI name.

    Raises:
        UnsupportedVariantError: for unknown names
    """
    try:
        return ACTIONS[name](kappa)
    except KeyError:
        raise UnsupportedVariantError(
            f"Unknown action {name!r}; expected one of {', '.join(sorted(ACTIONS))}"
        ) from None


# ---------------------------------------------------------------------------
# Numerical differentiation
# ---------------------------------------------------------------------------


def _matrix(x) -> ComplexMatrix:
    return np.asarray(x.matrix if hasattr(x, "matrix") else x, dtype=np.complex128)


def flow_fundamental_numeric(
    action: GroupAction,
    direction: LieDirection,
    x,
    h: float | None = None,
    richardson: bool = False,
) -> TangentVector:
    """
    d/dt act(curve(t), x) at t = 0 by central differences.

    Args:
        action: the group action
        direction: Lie algebra direction (a, b)
        x: base point
        h: step in [1e-7, 1e-3], default from config
        richardson: combine steps h and h/2 to cancel the O(h^2) error
    """
    h = config.FD_STEP if h is None else h
    if not 1e-7 <= h <= 1e-3:
        raise DomainError(h, f"Finite-difference step must lie in [1e-7, 1e-3], got {h}")

    def central(step: float) -> ComplexMatrix:
        forward = _matrix(action.act_along(direction, step, x))
        backward = _matrix(action.act_along(direction, -step, x))
        return (forward - backward) / (2.0 * step)

    derivative = central(h)
    if richardson:
        derivative = (4.0 * central(0.5 * h) - derivative) / 3.0
    return TangentVector(symmetrize(derivative), _kind(x))


def shift_point(x: PositiveOperator, v, step: float) -> PositiveOperator:
    """The point x + step * v, of the same kind as ``x``."""
    moved = np.asarray(x.matrix) + step * _matrix(v)
    if isinstance(x, DensityState):
        return density_state(moved)
    return positive_operator(moved)


def directional_derivative(
    field: Callable[[PositiveOperator], object], x: PositiveOperator, v, h: float
) -> ComplexMatrix:
    """
    D field(x)[v] by a central difference along v / |v|.

    The step is h * lambda_min(x), which keeps both shifted points inside the cone
    and makes the relative truncation error O(h^2) at any scale of x.
    """
    v = _matrix(v)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        return np.zeros_like(v)
    unit = v / norm
    step = h * float(x.spectrum.eigenvalues[0])
    forward = _matrix(field(shift_point(x, unit, step)))
    backward = _matrix(field(shift_point(x, unit, -step)))
    return norm * (forward - backward) / (2.0 * step)


def vector_field_bracket(
    x_field: Callable[[PositiveOperator], object],
    y_field: Callable[[PositiveOperator], object],
    x: PositiveOperator,
    h: float | None = None,
) -> ComplexMatrix:
    """
    [X, Y](x) = DY(x)[X(x)] - DX(x)[Y(x)], derivatives by central differences.

    Fields are callables from points to tangent vectors (or matrices).

    Raises:
        ConditioningError: when a shifted point leaves the positive cone
    """
    h = config.FD_OUTER_STEP if h is None else h
    forward = directional_derivative(y_field, x, x_field(x), h)
    backward = directional_derivative(x_field, x, y_field(x), h)
    return symmetrize(forward - backward)
