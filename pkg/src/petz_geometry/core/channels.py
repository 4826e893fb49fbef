"""Kraus channels, partial traces and the CPTP contraction check of monotone metrics."""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..config import config
from ..logging_config import get_logger
from .errors import CompletenessError, ConditioningError, DimensionMismatchError, DomainError
from .metric import metric_eval
from .models import (
    ComplexMatrix,
    ContractionReport,
    DensityState,
    MetricSpec,
    PositiveOperator,
    TangentKind,
    TangentVector,
)
from .spectral import as_square_matrix, is_unitary, symmetrize
from .states import (
    Seed,
    density_state,
    derive_seed,
    make_rng,
    random_density,
    random_isometry,
    random_tangent,
    tangent_matrix,
)

logger = get_logger(__name__)

COMPLETENESS_ATOL = 1e-10


@dataclass(frozen=True, eq=False)
class Channel:
    """CPTP map x -> sum_i K_i x K_i^dagger given by its Kraus operators."""

    kraus: tuple[ComplexMatrix, ...]

    def __post_init__(self):
        if not self.kraus:
            raise DimensionMismatchError("A channel needs at least one Kraus operator")
        ops = tuple(np.array(k, dtype=np.complex128) for k in self.kraus)
        shapes = {k.shape for k in ops}
        if len(shapes) != 1 or ops[0].ndim != 2:
            raise DimensionMismatchError(f"Kraus operators must share one 2-d shape, got {sorted(shapes)}")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "kraus", ops)

        total = sum(k.conj().T @ k for k in ops)
        residual = float(np.max(np.abs(total - np.eye(self.n_in))))
        if residual > COMPLETENESS_ATOL:
            raise CompletenessError(residual)

    @property
    def n_in(self) -> int:
        return int(self.kraus[0].shape[1])

    @property
    def n_out(self) -> int:
        return int(self.kraus[0].shape[0])

    def apply(self, x) -> ComplexMatrix:
        """Image of a Hermitian matrix (a state or a tangent vector)."""
        if isinstance(x, PositiveOperator | TangentVector):
            x = x.matrix
        x = np.asarray(x, dtype=np.complex128)
        if x.shape != (self.n_in, self.n_in):
            raise DimensionMismatchError(f"Channel input must be {self.n_in}x{self.n_in}, got {x.shape}")
        return symmetrize(sum(k @ x @ k.conj().T for k in self.kraus))

    def apply_state(self, rho: DensityState) -> DensityState:
        """
        Raises:
            ConditioningError: when the output state is not faithful
        """
        return density_state(self.apply(rho))

    def apply_tangent(self, v: TangentVector) -> TangentVector:
        return TangentVector(self.apply(v), TangentKind.STATE)


def partial_trace(x, dims: tuple[int, int], over: str = "B") -> ComplexMatrix:
    """Trace out subsystem ``over`` ("A" or "B") of an operator on H_A (x) H_B."""
    x = as_square_matrix(x)
    d_a, d_b = dims
    if x.shape[0] != d_a * d_b:
        raise DimensionMismatchError(f"Operator of size {x.shape[0]} does not factor as {d_a}x{d_b}")
    blocks = x.reshape(d_a, d_b, d_a, d_b)
    if over == "B":
        return np.einsum("ijkj->ik", blocks)
    if over == "A":
        return np.einsum("jijk->ik", blocks)
    raise DimensionMismatchError(f"Subsystem must be 'A' or 'B', got {over!r}")


def unitary_channel(u) -> Channel:
    u = as_square_matrix(u)
    if not is_unitary(u):
        raise DomainError(float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))), "Matrix is not unitary")
    return Channel((u,))


def depolarizing_channel(n: int, weight: float) -> Channel:
    """rho -> (1 - w) rho + w I/n with Kraus set {sqrt(1-w) I} and {sqrt(w/n) |i><j|}."""
    if not 0.0 <= weight <= 1.0:
        raise DomainError(weight, f"Depolarizing weight must lie in [0, 1], got {weight}")
    ops = [np.sqrt(1.0 - weight) * np.eye(n, dtype=np.complex128)]
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=np.complex128)
            e[i, j] = np.sqrt(weight / n)
            ops.append(e)
    return Channel(tuple(ops))


def random_cptp(n_in: int, n_env: int | None = None, seed: Seed = 0, n_out: int | None = None) -> Channel:
    """Random channel from a Stinespring isometry V: Kraus blocks V[i*n_out:(i+1)*n_out, :]."""
    n_env = config.ENV_DIM if n_env is None else n_env
    n_out = n_in if n_out is None else n_out
    v = random_isometry(n_out * n_env, n_in, seed)
    return Channel(tuple(v[i * n_out : (i + 1) * n_out, :] for i in range(n_env)))


def contraction_margin(m: MetricSpec, channel: Channel, rho: DensityState, v) -> float:
    """G_rho(v, v) - G_F(rho)(Fv, Fv), non-negative for a monotone metric."""
    v = tangent_matrix(v, rho)
    before = metric_eval(m, rho, v, v)
    image = channel.apply_state(rho)
    after = metric_eval(m, image, channel.apply(v), channel.apply(v))
    return before - after


def cptp_contraction_check(
    m: MetricSpec,
    channel: Channel,
    rho: DensityState | None = None,
    v=None,
    trials: int = 1,
    seed: int = 0,
    zero_band: float | None = None,
) -> ContractionReport:
    """
    Per-trial contraction margins of ``m`` under ``channel``.

    Missing ``rho``/``v`` are drawn per trial from the seed. Margins in
    [-zero_band, 0) count as numerical zeros; trials whose output state is not
    faithful are skipped and counted.
    """
    zero_band = config.tolerances().contraction if zero_band is None else zero_band
    margins: list[float] = []
    violations: list[tuple[int, float]] = []
    skipped = 0
    for trial in range(trials):
        rng = make_rng(derive_seed(seed, "contraction", trial))
        trial_rho = rho if rho is not None else random_density(channel.n_in, rng)
        trial_v = v if v is not None else random_tangent(trial_rho, rng)
        try:
            margin = contraction_margin(m, channel, trial_rho, trial_v)
        except ConditioningError as e:
            logger.debug(f"Contraction trial {trial} skipped: {e}")
            skipped += 1
            continue
        margins.append(margin)
        if margin < -zero_band:
            violations.append((trial, margin))
    if violations:
        logger.warning(f"{len(violations)} contraction violations for {m.function.label}")
    return ContractionReport(tuple(margins), tuple(violations), skipped)


def search_contraction_violation(
    m: MetricSpec,
    n: int,
    trials: int,
    seed: int = 0,
    channels: Sequence[Channel] | None = None,
) -> ContractionReport:
    """
    Adversarial search for a CPTP map that expands ``m``.

    States are drawn with log-uniform spectra down to 1e-4, where non-monotone GL
    functions misbehave; channels are random Stinespring channels unless given.
    The result is informational: finding nothing proves nothing.
    """
    margins: list[float] = []
    violations: list[tuple[int, float]] = []
    skipped = 0
    zero_band = config.tolerances().contraction
    for trial in range(trials):
        rng = make_rng(derive_seed(seed, "contraction-search", m.function.label, n, trial))
        channel = channels[trial % len(channels)] if channels else random_cptp(n, seed=rng)
        rho = _skewed_state(n, rng)
        v = random_tangent(rho, rng)
        try:
            margin = contraction_margin(m, channel, rho, v)
        except ConditioningError:
            skipped += 1
            continue
        margins.append(margin)
        if margin < -zero_band:
            violations.append((trial, margin))
    logger.info(
        f"Contraction search for {m.function.label} at n={n}: "
        f"{len(violations)} violations in {trials} trials ({skipped} skipped)"
    )
    return ContractionReport(tuple(margins), tuple(violations), skipped)


def _skewed_state(n: int, rng: np.random.Generator) -> DensityState:
    q = random_isometry(n, n, rng)
    p = np.exp(rng.uniform(np.log(1e-4), 0.0, size=n))
    p = p / p.sum()
    return density_state(symmetrize((q * p) @ q.conj().T))
