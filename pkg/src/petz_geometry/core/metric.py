"""Petz superoperator, monotone metric evaluation, gradient fields and the Fisher-Rao reduction."""

import numpy as np
from numpy.typing import ArrayLike

from ..config import config
from ..logging_config import get_logger
from .errors import (
    ConditioningError,
    DimensionMismatchError,
    DomainError,
    GradientCheckError,
)
from .functions import evaluate
from .models import (
    ComplexMatrix,
    DensityState,
    MetricSpec,
    MonotoneFunctionSpec,
    PetzSuperoperator,
    PositiveOperator,
    TangentKind,
    TangentVector,
)
from .spectral import schur_product
from .states import derive_seed, observable_matrix, random_tangent, tangent_matrix

logger = get_logger(__name__)

GRADIENT_CHECK_SAMPLES = 20


def build_K(x: PositiveOperator, spec: MonotoneFunctionSpec) -> PetzSuperoperator:
    """
    K^f at ``x`` as the eigenbasis table c_jk = p_k f(p_j / p_k).

    The table is symmetrized and its diagonal set to p_j * scale, both of which
    hold exactly for a symmetric, normalized f.

    Raises:
        ConditioningError: if an eigenvalue of ``x`` is not above the positivity floor
    """
    spectrum = x.spectrum
    p = spectrum.eigenvalues
    if p[0] <= config.POSITIVITY_FLOOR:
        raise ConditioningError(float(p[0]), f"Cannot build K at eigenvalue {p[0]:.3e}")

    coeffs = p[None, :] * evaluate(spec, p[:, None] / p[None, :])
    coeffs = 0.5 * (coeffs + coeffs.T)
    np.fill_diagonal(coeffs, p * spec.scale)
    return PetzSuperoperator(spectrum, coeffs, spec)


def apply_K(k: PetzSuperoperator, a) -> ComplexMatrix:
    """Multiply entry (j, k) of ``a`` in the eigenbasis by c_jk."""
    return schur_product(k.coeffs, observable_matrix(a), k.base)


def apply_K_inverse(k: PetzSuperoperator, a) -> ComplexMatrix:
    """Divide entry (j, k) of ``a`` in the eigenbasis by c_jk."""
    return schur_product(1.0 / k.coeffs, observable_matrix(a), k.base)


def metric_eval(
    m: MetricSpec,
    x: PositiveOperator,
    v,
    w,
    k: PetzSuperoperator | None = None,
) -> float:
    """
    G_x(v, w) = prefactor * Tr(v K^{-1}(w)).

    At a state the tangent vectors must be traceless; at a point of the cone any
    Hermitian v, w are accepted (the un-normalized metric).

    Args:
        m: metric spec
        x: base point, DensityState or PositiveOperator
        v, w: TangentVector or Hermitian matrices
        k: optional precomputed superoperator at ``x`` for ``m.function``
    """
    v = tangent_matrix(v, x)
    w = tangent_matrix(w, x)
    k = k or build_K(x, m.function)
    if k.base.dim != x.dim:
        raise DimensionMismatchError("Superoperator was built at a point of another dimension")

    basis = k.base
    value = np.sum(np.conj(basis.to_eigenbasis(v)) * basis.to_eigenbasis(w) / k.coeffs)
    return m.prefactor * float(value.real)


def gradient_field(
    m: MetricSpec,
    a,
    rho: DensityState,
    verify: bool = False,
    seed: int | None = None,
) -> TangentVector:
    """
    Gradient of l_a on S(H): prefactor^{-1} (K(a) - Tr(K(a)) rho).

    With ``verify`` the defining property G(grad, V) = Tr(aV) is checked on random
    traceless V.

    Raises:
        GradientCheckError: in checked mode, when the defining property fails
    """
    if not isinstance(rho, DensityState):
        raise DimensionMismatchError("gradient_field expects a point of S(H); use gradient_field_cone")
    a = observable_matrix(a)
    k = build_K(rho, m.function)
    ka = apply_K(k, a)
    grad = (ka - np.trace(ka).real * np.asarray(rho.matrix)) / m.prefactor
    field = TangentVector(grad, TangentKind.STATE)
    if verify:
        _check_gradient(m, a, rho, field, k, config.DEFAULT_SEED if seed is None else seed)
    return field


def _check_gradient(m, a, rho, field, k, seed: int) -> None:
    tol = config.tolerances().analytic
    for sample in range(GRADIENT_CHECK_SAMPLES):
        v = random_tangent(rho, derive_seed(seed, "gradient-check", sample))
        expected = float(np.sum(np.asarray(v.matrix) * a.T).real)
        actual = metric_eval(m, rho, field, v, k)
        if abs(actual - expected) > tol * (1.0 + abs(expected)):
            logger.warning(f"Gradient check failed: G(grad, V)={actual!r}, Tr(aV)={expected!r}")
            raise GradientCheckError(
                f"G(grad, V) = {actual!r} differs from Tr(aV) = {expected!r} on sample {sample}"
            )


def gradient_field_cone(m: MetricSpec, a, omega: PositiveOperator) -> TangentVector:
    """Gradient of the expectation function on P(H) for the un-normalized metric."""
    k = build_K(omega, m.function)
    return TangentVector(apply_K(k, a) / m.prefactor, TangentKind.CONE)


def fisher_rao_eval(p: ArrayLike, u: ArrayLike, v: ArrayLike) -> float:
    """Classical Fisher-Rao metric sum_j u_j v_j / p_j on the open simplex."""
    p = np.asarray(p, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if p.ndim != 1 or u.shape != p.shape or v.shape != p.shape:
        raise DimensionMismatchError(f"Shapes differ: p {p.shape}, u {u.shape}, v {v.shape}")
    if np.any(p <= 0):
        raise DomainError(float(p.min()), "Probability vector must be strictly positive")
    if abs(p.sum() - 1.0) > config.TRACE_ATOL * p.size:
        raise DomainError(float(p.sum()), f"Probability vector must sum to 1, got {p.sum()!r}")
    for name, vector in (("u", u), ("v", v)):
        if abs(vector.sum()) > 1e-10 * (1.0 + float(np.abs(vector).max(initial=0.0))):
            raise DomainError(float(vector.sum()), f"Tangent {name} must sum to 0")
    return float(np.sum(u * v / p))
