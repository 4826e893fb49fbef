"""Dense Hermitian linear algebra: Jacobi eigensolver, functional calculus, divided differences."""

from collections.abc import Callable
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray

from ..config import config
from ..logging_config import get_logger
from .errors import ConvergenceError, DimensionMismatchError, DomainError, NotHermitianError
from .models import ComplexMatrix, RealTable, SpectralDecomposition

logger = get_logger(__name__)

ScalarFunction = Callable[[NDArray[np.float64]], NDArray[np.float64]]


def as_square_matrix(a) -> ComplexMatrix:
    """Coerce ``a`` to a finite square complex matrix."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionMismatchError(f"Expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError(float("nan"), "Matrix has non-finite entries")
    return m


def hermitian(a, atol: float | None = None) -> ComplexMatrix:
    """
    Validate and canonicalize a Hermitian matrix.

    Every entry of A - A^dagger must be within ``atol`` in absolute value; the returned
    matrix is the exact symmetrization (A + A^dagger) / 2.
    """
    m = as_square_matrix(a)
    tol = config.HERMITIAN_ATOL if atol is None else atol
    deviation = float(np.max(np.abs(m - m.conj().T)))
    if deviation > tol:
        raise NotHermitianError(deviation, tol)
    return symmetrize(m)


def symmetrize(m: ComplexMatrix) -> ComplexMatrix:
    """Hermitian part of ``m``."""
    return 0.5 * (m + m.conj().T)


def check_same_dim(*matrices) -> int:
    """Return the common dimension of square matrices or raise."""
    dims = {np.shape(m) for m in matrices}
    if len(dims) != 1:
        raise DimensionMismatchError(f"Dimension mismatch: {sorted(dims)}")
    return int(np.shape(matrices[0])[0])


def operator_norm(a) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(np.asarray(a), 2))


def is_unitary(u, atol: float = 1e-10) -> bool:
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= atol)


def _off_norm(a: ComplexMatrix) -> float:
    return float(np.linalg.norm(a - np.diag(np.diagonal(a))))


@lru_cache(maxsize=16)
def _round_robin(n: int) -> tuple[tuple[NDArray[np.intp], NDArray[np.intp]], ...]:
    """Rounds of disjoint (p, q) pairs that together cover every pair once."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        pairs = sorted(
            (min(players[i], players[m - 1 - i]), max(players[i], players[m - 1 - i]))
            for i in range(m // 2)
            if players[i] >= 0 and players[m - 1 - i] >= 0
        )
        p = np.array([pair[0] for pair in pairs], dtype=np.intp)
        q = np.array([pair[1] for pair in pairs], dtype=np.intp)
        rounds.append((p, q))
        players = [players[0], players[-1], *players[1:-1]]
    return tuple(rounds)


def _rotate_round(
    work: ComplexMatrix, vectors: ComplexMatrix, p: NDArray[np.intp], q: NDArray[np.intp]
) -> tuple[ComplexMatrix, ComplexMatrix]:
    """Annihilate work[p, q] for a set of disjoint pairs with one block of complex Jacobi rotations."""
    apq = work[p, q]
    magnitude = np.abs(apq)
    active = magnitude > 0.0
    safe = np.where(active, magnitude, 1.0)

    theta = (work[q, q].real - work[p, p].real) / (2.0 * safe)
    t = 1.0 / (np.abs(theta) + np.hypot(theta, 1.0))
    t = np.where(theta < 0.0, -t, t)
    c = np.where(active, 1.0 / np.sqrt(t * t + 1.0), 1.0)
    s = np.where(active, t * c, 0.0)
    phase = np.where(active, np.conj(apq / safe), 1.0)

    # diag(1, phase) @ [[c, s], [-s, c]] on every (p, q) plane
    rotation = np.eye(work.shape[0], dtype=np.complex128)
    rotation[p, p] = c
    rotation[p, q] = s
    rotation[q, p] = -phase * s
    rotation[q, q] = phase * c

    work = rotation.conj().T @ work @ rotation
    work[p, q] = 0.0
    work[q, p] = 0.0
    work = 0.5 * (work + work.conj().T)
    return work, vectors @ rotation


def _fix_phases(vectors: ComplexMatrix) -> ComplexMatrix:
    """Make the largest-magnitude component of every column real and positive."""
    out = vectors.copy()
    for k in range(out.shape[1]):
        magnitudes = np.abs(out[:, k])
        # first index within rounding of the maximum, so ties resolve by position
        index = int(np.flatnonzero(magnitudes >= magnitudes.max() - 1e-12)[0])
        out[:, k] *= np.conj(out[index, k]) / magnitudes[index]
    return out


def cluster_eigenvalues(eigenvalues: NDArray[np.float64]) -> tuple[tuple[int, ...], ...]:
    """Group ascending eigenvalues whose consecutive relative gaps are below the threshold."""
    clusters: list[list[int]] = []
    for index, value in enumerate(eigenvalues):
        if clusters:
            previous = eigenvalues[index - 1]
            scale = max(1.0, abs(previous), abs(value))
            if abs(value - previous) <= config.CLUSTER_RTOL * scale:
                clusters[-1].append(index)
                continue
        clusters.append([index])
    return tuple(tuple(c) for c in clusters)


def hermitian_eig(a) -> SpectralDecomposition:
    """
    Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    Each sweep visits every (p, q) pair once in tournament order, rotating a round of
    disjoint pairs at a time. Eigenvalues come back ascending; the fixed sweep order and
    the phase convention make the result deterministic for a fixed input.

    Args:
        a: Hermitian matrix

    Returns:
        SpectralDecomposition with degeneracy clusters

    Raises:
        ConvergenceError: if the off-diagonal mass does not vanish within the sweep limit
    """
    work = hermitian(a).copy()
    n = work.shape[0]
    vectors = np.eye(n, dtype=np.complex128)
    threshold = max(config.JACOBI_RTOL * float(np.linalg.norm(work)), 1e-300)

    sweeps = 0
    off = _off_norm(work)
    while off > threshold:
        if sweeps >= config.JACOBI_MAX_SWEEPS:
            raise ConvergenceError(off, sweeps)
        for p, q in _round_robin(n):
            work, vectors = _rotate_round(work, vectors, p, q)
        sweeps += 1
        off = _off_norm(work)

    eigenvalues = np.diagonal(work).real.copy()
    order = np.argsort(eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    vectors = _fix_phases(vectors[:, order])
    logger.debug(f"Jacobi converged: n={n}, sweeps={sweeps}, off={off:.2e}")
    return SpectralDecomposition(eigenvalues, vectors, cluster_eigenvalues(eigenvalues))


def spectrum_of(x) -> SpectralDecomposition:
    """Accept either a decomposition or a Hermitian matrix."""
    return x if isinstance(x, SpectralDecomposition) else hermitian_eig(x)


def spectral_map(spectrum: SpectralDecomposition, f: ScalarFunction) -> SpectralDecomposition:
    """Decomposition of f(A) for a strictly increasing f, reusing the eigenbasis of A."""
    values = _evaluate(f, spectrum.eigenvalues)
    return SpectralDecomposition(values, spectrum.eigenvectors, spectrum.clusters)


def _evaluate(f: ScalarFunction, points: NDArray[np.float64]) -> NDArray[np.float64]:
    with np.errstate(all="ignore"):
        values = np.asarray(f(points), dtype=np.float64)
    values = np.broadcast_to(values, points.shape).copy()
    bad = ~np.isfinite(values)
    if bad.any():
        offending = float(points[bad][0])
        raise DomainError(offending, f"Function undefined at eigenvalue {offending!r}")
    return values


def apply_scalar_function(spectrum: SpectralDecomposition, f: ScalarFunction) -> ComplexMatrix:
    """
    Functional calculus f(A) = U diag(f(p)) U^dagger.

    Raises:
        DomainError: naming the first eigenvalue where f is not finite
    """
    values = _evaluate(f, spectrum.eigenvalues)
    u = spectrum.eigenvectors
    return symmetrize((u * values) @ u.conj().T)


def first_divided_difference(
    spectrum: SpectralDecomposition, f: ScalarFunction, fprime: ScalarFunction
) -> RealTable:
    """
    Table f^[1]: (f(p_j) - f(p_k)) / (p_j - p_k) across clusters, f'(p_j) inside a cluster.

    Within a cluster the off-diagonal entries take the mean of the two derivatives so
    the table stays exactly symmetric.
    """
    p = spectrum.eigenvalues
    values = _evaluate(f, p)
    derivatives = _evaluate(fprime, p)
    same = spectrum.same_cluster()

    with np.errstate(all="ignore"):
        table = (values[:, None] - values[None, :]) / (p[:, None] - p[None, :])
    table = np.where(same, 0.5 * (derivatives[:, None] + derivatives[None, :]), table)
    np.fill_diagonal(table, derivatives)
    return 0.5 * (table + table.T)


def schur_product(table, a, basis: SpectralDecomposition) -> ComplexMatrix:
    """Entrywise product of ``table`` with the entries of ``a`` in ``basis``."""
    table = np.asarray(table, dtype=np.float64)
    a = np.asarray(a, dtype=np.complex128)
    if table.shape != (basis.dim, basis.dim) or a.shape != table.shape:
        raise DimensionMismatchError(
            f"Schur product shapes differ: table {table.shape}, matrix {a.shape}, basis {basis.dim}"
        )
    return symmetrize(basis.from_eigenbasis(table * basis.to_eigenbasis(a)))


def comm(a, b) -> ComplexMatrix:
    """[a, b] = (i/2)(ab - ba)."""
    check_same_dim(a, b)
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    return 0.5j * (a @ b - b @ a)


def anticomm(a, b) -> ComplexMatrix:
    """{a, b} = (1/2)(ab + ba)."""
    check_same_dim(a, b)
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    return 0.5 * (a @ b + b @ a)


def _require_positive(spectrum: SpectralDecomposition, operation: str) -> None:
    smallest = float(spectrum.eigenvalues[0])
    if smallest <= 0.0:
        raise DomainError(smallest, f"{operation} requires a positive spectrum, found eigenvalue {smallest!r}")


def matrix_power(x, t: float) -> ComplexMatrix:
    """A**t for a positive definite A (decomposition or matrix)."""
    spectrum = spectrum_of(x)
    _require_positive(spectrum, "matrix_power")
    return apply_scalar_function(spectrum, lambda p: p**t)


def matrix_log(x) -> ComplexMatrix:
    spectrum = spectrum_of(x)
    _require_positive(spectrum, "matrix_log")
    return apply_scalar_function(spectrum, np.log)


def matrix_exp(a) -> ComplexMatrix:
    return apply_scalar_function(spectrum_of(a), np.exp)


def dexp_table(spectrum: SpectralDecomposition) -> RealTable:
    """Divided differences of exp, evaluated as e^{p_k} expm1(p_j - p_k) / (p_j - p_k)."""
    p = spectrum.eigenvalues
    delta = p[:, None] - p[None, :]
    with np.errstate(all="ignore"):
        table = np.exp(p)[None, :] * np.expm1(delta) / delta
    midpoint = np.exp(0.5 * (p[:, None] + p[None, :]))
    table = np.where(spectrum.same_cluster(), midpoint, table)
    np.fill_diagonal(table, np.exp(p))
    return 0.5 * (table + table.T)


def dexp_directional(a, v) -> ComplexMatrix:
    """d/dt exp(A + tV) at t = 0, via the Schur product with the divided differences of exp."""
    spectrum = spectrum_of(a)
    v = hermitian(v)
    if v.shape[0] != spectrum.dim:
        raise DimensionMismatchError(f"Direction has dimension {v.shape[0]}, expected {spectrum.dim}")
    return schur_product(dexp_table(spectrum), v, spectrum)
