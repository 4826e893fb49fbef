"""Points and tangent vectors of P(H) and S(H), expectation values, seeded generators."""

import hashlib

import numpy as np

from ..config import config
from .errors import ConditioningError, DimensionMismatchError, NotHermitianError
from .models import (
    ComplexMatrix,
    DensityState,
    Observable,
    PositiveOperator,
    SpectralDecomposition,
    TangentKind,
    TangentVector,
)
from .spectral import check_same_dim, hermitian, hermitian_eig, symmetrize

Seed = int | np.random.Generator


def positive_operator(m, spectrum: SpectralDecomposition | None = None) -> PositiveOperator:
    """
    Validate an invertible positive operator.

    Raises:
        ConditioningError: if an eigenvalue does not exceed the positivity floor
    """
    matrix = hermitian(m)
    spectrum = spectrum or hermitian_eig(matrix)
    _check_floor(spectrum)
    return PositiveOperator(matrix, spectrum)


def density_state(m, spectrum: SpectralDecomposition | None = None) -> DensityState:
    """Validate a faithful unit-trace state."""
    matrix = hermitian(m)
    spectrum = spectrum or hermitian_eig(matrix)
    _check_floor(spectrum)
    trace = float(np.sum(spectrum.eigenvalues))
    if abs(trace - 1.0) > config.TRACE_ATOL:
        raise DimensionMismatchError(f"Density matrix must have unit trace, got {trace!r}")
    return DensityState(matrix, spectrum)


def _check_floor(spectrum: SpectralDecomposition) -> None:
    smallest = float(spectrum.eigenvalues[0])
    if smallest <= config.POSITIVITY_FLOOR:
        raise ConditioningError(
            smallest,
            f"Smallest eigenvalue {smallest:.3e} is not above the positivity floor "
            f"{config.POSITIVITY_FLOOR:.1e}",
        )


def observable_matrix(a) -> ComplexMatrix:
    """Matrix of an Observable or of a raw Hermitian array."""
    if isinstance(a, Observable):
        return np.asarray(a.matrix)
    return hermitian(a)


def as_observable(a) -> Observable:
    return a if isinstance(a, Observable) else Observable(hermitian(a))


def project_to_states(omega: PositiveOperator) -> DensityState:
    """pi(omega) = omega / Tr(omega), the trace taken as the sum of eigenvalues."""
    if isinstance(omega, DensityState):
        return omega
    trace = omega.trace
    spectrum = omega.spectrum
    scaled = SpectralDecomposition(spectrum.eigenvalues / trace, spectrum.eigenvectors, spectrum.clusters)
    return DensityState(np.asarray(omega.matrix) / trace, scaled)


normalize = project_to_states


def immerse(rho: DensityState) -> PositiveOperator:
    """Canonical immersion i: S(H) -> P(H)."""
    return PositiveOperator(rho.matrix, rho.spectrum)


def expectation(a, x: PositiveOperator) -> float:
    """l_a(x) = Tr(x a) for a state or positive operator."""
    a = observable_matrix(a)
    matrix = np.asarray(x.matrix)
    check_same_dim(a, matrix)
    value = complex(np.sum(matrix * a.T))
    if abs(value.imag) > config.TRACE_ATOL * (1.0 + abs(value.real)):
        raise NotHermitianError(abs(value.imag), config.TRACE_ATOL)
    return value.real


def dilation_field(omega: PositiveOperator) -> TangentVector:
    """Delta(omega) = omega."""
    return TangentVector(omega.matrix, TangentKind.CONE)


def tangent_project(v, rho: DensityState) -> TangentVector:
    """Traceless part v - Tr(v) rho of a Hermitian v at the state rho."""
    v = hermitian(v)
    check_same_dim(v, rho.matrix)
    return TangentVector(v - np.trace(v).real * np.asarray(rho.matrix), TangentKind.STATE)


def tangent_matrix(v, base: PositiveOperator) -> ComplexMatrix:
    """
    Matrix of a tangent vector at ``base``, checking it belongs to that tangent space.

    State-space vectors are accepted at cone points (T_rho S(H) sits inside T_omega P(H)
    through the immersion); cone vectors are rejected at states.
    """
    if isinstance(v, TangentVector):
        if v.kind is TangentKind.CONE and isinstance(base, DensityState):
            raise DimensionMismatchError("Cone tangent vector used at a point of S(H)")
        matrix = np.asarray(v.matrix)
    else:
        matrix = hermitian(v)
    check_same_dim(matrix, base.matrix)
    if isinstance(base, DensityState):
        trace = abs(np.trace(matrix))
        if trace > config.TRACE_ATOL * max(1.0, float(np.max(np.abs(matrix)))):
            raise DimensionMismatchError(f"Tangent vector at a state must be traceless, |Tr| = {trace:.3e}")
    return matrix


def derive_seed(master: int, *coords) -> int:
    """Per-cell seed from a master seed and cell coordinates (stable across runs)."""
    key = ":".join(str(c) for c in (master, *coords))
    return int.from_bytes(hashlib.sha256(key.encode("utf-8")).digest()[:8], "big")


def make_rng(seed: Seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> ComplexMatrix:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)


def random_hermitian(n: int, seed: Seed) -> ComplexMatrix:
    """GUE-like Hermitian matrix with O(1) entries."""
    return symmetrize(_ginibre(make_rng(seed), n, n))


def random_density(n: int, seed: Seed) -> DensityState:
    """Ginibre state G G^dagger / Tr, mixed with I/n to stay above the positivity floor."""
    if n < 2:
        raise DimensionMismatchError(f"Random states need n >= 2, got {n}")
    g = _ginibre(make_rng(seed), n, n)
    w = g @ g.conj().T
    w = w / np.trace(w).real
    weight = config.RANDOM_MIX_WEIGHT
    return density_state(symmetrize((1.0 - weight) * w + weight * np.eye(n) / n))


def random_positive(n: int, seed: Seed) -> PositiveOperator:
    """Random point of P(H): a random state times a log-uniform scale in [0.5, 2]."""
    rng = make_rng(seed)
    rho = random_density(n, rng)
    scale = float(np.exp(rng.uniform(np.log(0.5), np.log(2.0))))
    return positive_operator(np.asarray(rho.matrix) * scale)


def random_observable(n: int, seed: Seed) -> Observable:
    return Observable(random_hermitian(n, seed))


def random_tangent(rho: DensityState, seed: Seed) -> TangentVector:
    return tangent_project(random_hermitian(rho.dim, seed), rho)


def random_unitary(n: int, seed: Seed) -> ComplexMatrix:
    """exp(iH) for a random Hermitian H."""
    spectrum = hermitian_eig(random_hermitian(n, seed))
    u = spectrum.eigenvectors
    return (u * np.exp(1j * spectrum.eigenvalues)) @ u.conj().T


def random_isometry(rows: int, cols: int, seed: Seed) -> ComplexMatrix:
    """Haar-distributed isometry V (V^dagger V = I) from the QR factorization of a Gaussian block."""
    if rows < cols:
        raise DimensionMismatchError(f"Isometry needs rows >= cols, got {rows}x{cols}")
    q, r = np.linalg.qr(_ginibre(make_rng(seed), rows, cols))
    diagonal = np.diagonal(r)
    phases = np.where(np.abs(diagonal) > 0, diagonal / np.abs(diagonal), 1.0)
    return q * phases


def random_gl(n: int, seed: Seed) -> ComplexMatrix:
    """Well-conditioned invertible matrix U diag(s) V with s log-uniform in [0.5, 2]."""
    rng = make_rng(seed)
    left = random_unitary(n, rng)
    right = random_unitary(n, rng)
    singular = np.exp(rng.uniform(np.log(0.5), np.log(2.0), size=n))
    return (left * singular) @ right
