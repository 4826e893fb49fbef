"""Candidate Petz functions: evaluation, symmetry checks, monotonicity witnesses."""

from collections.abc import Callable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..config import config
from ..logging_config import get_logger
from .errors import DomainError, SpecParseError, UnsupportedVariantError
from .models import (
    ComplexMatrix,
    DerivativeAtZero,
    MonotoneFunctionSpec,
    MonotonicityWitness,
    SpectralDecomposition,
    SymmetryReport,
    Variant,
)
from .spectral import apply_scalar_function, hermitian_eig, symmetrize
from .states import derive_seed, make_rng, random_isometry

logger = get_logger(__name__)

ALIASES: dict[str, Callable[[], MonotoneFunctionSpec]] = {
    "bh": MonotoneFunctionSpec.bures_helstrom,
    "wy": MonotoneFunctionSpec.wigner_yanase,
    "bkm": MonotoneFunctionSpec.bkm,
    "test:square": lambda: MonotoneFunctionSpec(Variant.TEST_SQUARE),
    "test:identity": lambda: MonotoneFunctionSpec(Variant.TEST_IDENTITY),
}

# classic 2x2 pair with A <= B but A^2 not <= B^2
_CLASSIC_A = np.array([[1.0, 1.0], [1.0, 1.0]])
_CLASSIC_B = np.array([[2.0, 1.0], [1.0, 1.0]])
_WITNESS_BATCH = 256


def parse_spec(text: str) -> MonotoneFunctionSpec:
    """
    Parse the CLI spelling of a function spec.

    Accepted forms: ``gl:<kappa>``, ``bkm``, ``bh``, ``wy``, ``test:square``,
    ``test:identity``, each optionally followed by ``*<scale>``.

    Raises:
        SpecParseError: for unknown names or malformed numbers
    """
    raw = text.strip().lower()
    name, _, scale_text = raw.partition("*")
    scale = 1.0
    if scale_text:
        scale = _parse_positive(scale_text, text, "scale")

    if name in ALIASES:
        spec = ALIASES[name]()
    elif name.startswith("gl:"):
        spec = MonotoneFunctionSpec.gl(_parse_positive(name[3:], text, "kappa"))
    else:
        raise SpecParseError(f"Unknown function spec {text!r}")

    if scale != 1.0:
        spec = MonotoneFunctionSpec(spec.variant, spec.kappa, scale, spec.alias)
    return spec


def _parse_positive(value: str, text: str, what: str) -> float:
    try:
        number = float(value)
    except ValueError as e:
        raise SpecParseError(f"Malformed {what} in function spec {text!r}") from e
    if not np.isfinite(number) or number <= 0:
        raise SpecParseError(f"{what} must be a positive number in function spec {text!r}")
    return number


def _normalized(spec: MonotoneFunctionSpec, x: NDArray[np.float64]) -> NDArray[np.float64]:
    """f / scale on an array; NaN where the function is undefined."""
    if spec.variant is Variant.TEST_SQUARE:
        return x * x
    if spec.variant is Variant.TEST_IDENTITY:
        return x.copy()

    positive = x > 0
    safe = np.where(positive, x, 1.0)
    u = np.log(safe)
    with np.errstate(all="ignore"):
        if spec.variant is Variant.BKM:
            closed = np.expm1(u) / u
            series = 1.0 + u / 2.0 + u * u / 6.0
        else:
            k = spec.kappa
            closed = 0.5 * k * np.expm1(u) * (safe**k + 1.0) / np.expm1(k * u)
            series = 1.0 + u / 2.0 + (1.0 / 6.0 + k * k / 12.0) * u * u
    values = np.where(np.abs(safe - 1.0) < config.SERIES_RADIUS, series, closed)
    return np.where(positive, values, np.nan)


def scalar_callable(spec: MonotoneFunctionSpec) -> Callable[[NDArray[np.float64]], NDArray[np.float64]]:
    """Vectorized f for functional calculus; undefined points come back as NaN."""

    def f(x: NDArray[np.float64]) -> NDArray[np.float64]:
        return spec.scale * _normalized(spec, np.asarray(x, dtype=np.float64))

    return f


def evaluate(spec: MonotoneFunctionSpec, xs: ArrayLike) -> NDArray[np.float64]:
    """f on an array of positive reals."""
    x = np.asarray(xs, dtype=np.float64)
    bad = ~(x > 0)
    if bad.any():
        offending = float(x[bad].flat[0])
        raise DomainError(offending, f"{spec.label} is defined for x > 0 only, got {offending!r}")
    return spec.scale * _normalized(spec, x)


def eval_f(spec: MonotoneFunctionSpec, x: float) -> float:
    """
    Evaluate the candidate Petz function at a positive real.

    The GL family f(x) = (kappa/2)(x-1)(x^kappa+1)/(x^kappa-1) and the BKM function
    (x-1)/ln x switch to their second-order expansion in ln x within the series
    radius of 1, so f(1) equals the scale exactly.
    """
    return float(evaluate(spec, np.array([x]))[0])


def phi(x: ArrayLike, kappa: float) -> NDArray[np.float64]:
    """Deformation phi(x) = x**kappa (constant c fixed to 1)."""
    return np.asarray(x, dtype=np.float64) ** kappa


def phi_inverse(y: ArrayLike, kappa: float) -> NDArray[np.float64]:
    return np.asarray(y, dtype=np.float64) ** (1.0 / kappa)


def standard_log_grid(low: float = 1e-3, high: float = 1e3, points: int = 61) -> NDArray[np.float64]:
    """Log-spaced grid used by the symmetry and decomposition checks."""
    return np.logspace(np.log10(low), np.log10(high), points)


def check_symmetry(
    spec: MonotoneFunctionSpec, grid: Sequence[float] | NDArray[np.float64], tol: float | None = None
) -> SymmetryReport:
    """
    Residuals of f(t) = t f(1/t) (relative to f(t)) and of f(1) = scale.

    Grid points whose residual exceeds ``tol`` are listed as violations; a failed
    normalization adds 1.0 to the list.
    """
    tol = config.tolerances().structural if tol is None else tol
    t = np.asarray(grid, dtype=np.float64)
    values = evaluate(spec, t)
    mirrored = t * evaluate(spec, 1.0 / t)
    residuals = np.abs(values - mirrored) / np.abs(values)
    normalization = abs(eval_f(spec, 1.0) - spec.scale)

    violations = [float(x) for x, r in zip(t, residuals, strict=True) if r > tol]
    if normalization > tol and 1.0 not in violations:
        violations.append(1.0)
    return SymmetryReport(
        max_residual=float(residuals.max(initial=0.0)),
        normalization_residual=normalization,
        violations=tuple(sorted(violations)),
    )


def rational_decomposition(k: int, n: int, x: ArrayLike) -> NDArray[np.float64]:
    """
    f for kappa = k/n written as a sum of operator monotone pieces:

        (k / 2n) (x^{k/n} + 1 + sum_l (sum_j x^{(j-l)/n})^{-1} + sum_l (sum_j x^{(j-l-k)/n})^{-1})

    with l = k..n-1 and j = 0..k-1. Each inverse power sum is operator monotone, which is
    how the GL family is shown monotone for rational kappa in (0, 1).
    """
    if not 0 < k < n:
        raise DomainError(k / n if n else float("nan"), f"Need 0 < k < n, got k={k}, n={n}")
    x = np.asarray(x, dtype=np.float64)
    if np.any(x <= 0):
        raise DomainError(float(x[x <= 0].flat[0]), "rational_decomposition needs x > 0")

    y = x ** (1.0 / n)
    total = y**k + 1.0
    for l in range(k, n):
        total = total + 1.0 / sum(y ** (j - l) for j in range(k))
        total = total + 1.0 / sum(y ** (j - l - k) for j in range(k))
    return k / (2.0 * n) * total


def apply_to_matrix(spec: MonotoneFunctionSpec, a, spectrum: SpectralDecomposition | None = None) -> ComplexMatrix:
    """f(A); test polynomials are applied directly so that singular A is allowed."""
    a = np.asarray(a, dtype=np.complex128)
    if spec.variant is Variant.TEST_SQUARE:
        return spec.scale * symmetrize(a @ a)
    if spec.variant is Variant.TEST_IDENTITY:
        return spec.scale * symmetrize(a)
    return apply_scalar_function(spectrum or hermitian_eig(a), scalar_callable(spec))


def _monotonicity_gap(spec: MonotoneFunctionSpec, a, b, a_spectrum=None) -> float:
    """Smallest eigenvalue of f(B) - f(A)."""
    difference = apply_to_matrix(spec, b) - apply_to_matrix(spec, a, a_spectrum)
    return float(hermitian_eig(symmetrize(difference)).eigenvalues[0])


def _screened_gaps(
    spec: MonotoneFunctionSpec, a: NDArray[np.complex128], b: NDArray[np.complex128]
) -> NDArray[np.float64]:
    """lambda_min(f(B) - f(A)) over stacks of pairs by batched LAPACK eigh; NaN where f is undefined."""
    f = scalar_callable(spec)

    def apply(m: NDArray[np.complex128]) -> NDArray[np.complex128]:
        w, v = np.linalg.eigh(m)
        with np.errstate(all="ignore"):
            values = f(w)
        return (v * values[:, None, :]) @ np.conj(np.swapaxes(v, -1, -2))

    difference = apply(b) - apply(a)
    difference = 0.5 * (difference + np.conj(np.swapaxes(difference, -1, -2)))
    if not np.all(np.isfinite(difference)):
        finite = np.all(np.isfinite(difference), axis=(-2, -1))
        gaps = np.full(difference.shape[0], np.nan)
        if finite.any():
            gaps[finite] = np.linalg.eigvalsh(difference[finite])[:, 0]
        return gaps
    return np.linalg.eigvalsh(difference)[:, 0]


def _log_uniform(rng: np.random.Generator, low: float, high: float, size=None):
    return np.exp(rng.uniform(np.log(low), np.log(high), size=size))


def _sample_pair(rng: np.random.Generator, n: int, guided: bool):
    """A with log-uniform spectrum and B = A + P, P positive semi-definite."""
    q = random_isometry(n, n, rng)
    eigenvalues = _log_uniform(rng, config.WITNESS_EIG_LOW, config.WITNESS_EIG_HIGH, size=n)
    if guided:
        # push one eigenvalue into the region where f'(x) < 0 for kappa > 1
        eigenvalues[0] = _log_uniform(rng, config.WITNESS_EIG_LOW, 10 * config.WITNESS_EIG_LOW)
    order = np.argsort(eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    q = q[:, order]
    a_spectrum = SpectralDecomposition(eigenvalues, q, tuple((j,) for j in range(n)))
    a = symmetrize(a_spectrum.reconstruct())

    if guided:
        v = q[:, :1]
        p = eigenvalues[0] * rng.uniform(0.05, 1.0) * (v @ v.conj().T)
    else:
        g = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
        p = g @ g.conj().T
        p = p * _log_uniform(rng, 1e-3, 10.0) / np.trace(p).real
    return a_spectrum, a, symmetrize(a + p)


def matrix_monotonicity_witness(
    spec: MonotoneFunctionSpec,
    n: int,
    trials: int,
    seed: int,
    threshold: float | None = None,
) -> MonotonicityWitness | None:
    """
    Search for A <= B with lambda_min(f(B) - f(A)) below -threshold.

    Falsification only: ``None`` means no violation was found at this many trials.
    Trial 0 is the classic 2x2 pair (padded with the identity) for functions defined
    at 0; later trials alternate between guided samples, with A having one eigenvalue
    in [1e-4, 1e-3] and P along its eigenvector, and generic ones.
    """
    if n < 2:
        raise DomainError(float(n), f"Witness search needs n >= 2, got {n}")
    if trials < 1:
        raise DomainError(float(trials), f"Witness search needs at least one trial, got {trials}")
    threshold = config.tolerances().witness if threshold is None else threshold

    first = 0
    if spec.defined_at_zero:
        a = np.eye(n, dtype=np.complex128)
        b = np.eye(n, dtype=np.complex128)
        a[:2, :2] = _CLASSIC_A
        b[:2, :2] = _CLASSIC_B
        gap = _monotonicity_gap(spec, a, b)
        if gap < -threshold:
            logger.debug(f"Witness for {spec.label} at n={n}, trial=0: lambda_min={gap:.3e}")
            return MonotonicityWitness(a=a, b=b, min_eigenvalue=gap, trial=0)
        first = 1

    for start in range(first, trials, _WITNESS_BATCH):
        block = range(start, min(start + _WITNESS_BATCH, trials))
        samples = [
            _sample_pair(make_rng(derive_seed(seed, "witness", spec.label, n, trial)), n, guided=trial % 2 == 0)
            for trial in block
        ]
        screened = _screened_gaps(spec, np.stack([s[1] for s in samples]), np.stack([s[2] for s in samples]))
        # candidates are confirmed through the Jacobi path before they are reported
        for offset in np.flatnonzero(screened < -0.5 * threshold):
            a_spectrum, a, b = samples[offset]
            gap = _monotonicity_gap(spec, a, b, a_spectrum)
            if gap < -threshold:
                trial = start + int(offset)
                logger.debug(f"Witness for {spec.label} at n={n}, trial={trial}: lambda_min={gap:.3e}")
                return MonotonicityWitness(a=a, b=b, min_eigenvalue=gap, trial=trial)

    logger.debug(f"No witness for {spec.label} at n={n} after {trials} trials")
    return None


def derivative_at_zero_plus(spec: MonotoneFunctionSpec) -> DerivativeAtZero:
    """
    Numerical limit of f'(x) as x -> 0+ for the GL family.

    Secant slopes over [x, 1.01 x] at x = 1e-3 .. 1e-8 are extrapolated geometrically
    from the last three samples. Growing successive differences mean the slope
    diverges, which is reported as +inf.

    Raises:
        UnsupportedVariantError: for anything but the GL family
    """
    if spec.variant is not Variant.GL_FAMILY:
        raise UnsupportedVariantError(f"derivative_at_zero_plus supports the GL family only, got {spec.label}")

    xs = 10.0 ** -np.arange(3, 9, dtype=np.float64)
    slopes = (evaluate(spec, 1.01 * xs) - evaluate(spec, xs)) / (0.01 * xs)
    samples = tuple((float(x), float(s)) for x, s in zip(xs, slopes, strict=True))

    d1, d2, d3 = slopes[-3:]
    first, second = d2 - d1, d3 - d2
    # secants at x = 1e-8 carry roughly 1e-6 of cancellation noise
    noise = 1e-4 * max(1.0, abs(d3))
    if abs(first) <= noise and abs(second) <= noise:
        return DerivativeAtZero(value=float(d3), diverges=False, samples=samples)

    ratio = second / first
    if abs(ratio) >= 1.0:
        value = float("inf") if second > 0 else float("-inf")
        return DerivativeAtZero(value=value, diverges=True, samples=samples)
    return DerivativeAtZero(value=float(d3 + second * ratio / (1.0 - ratio)), diverges=False, samples=samples)
