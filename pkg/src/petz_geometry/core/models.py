"""Core data models: spectra, states, tangent vectors, function specs, group elements."""

from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np
from numpy.typing import NDArray

ComplexMatrix = NDArray[np.complex128]
RealTable = NDArray[np.float64]


def _frozen(array, dtype) -> np.ndarray:
    """Copy ``array`` into a read-only numpy array of ``dtype``."""
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigensystem of a Hermitian matrix with ascending eigenvalues."""

    eigenvalues: NDArray[np.float64]
    eigenvectors: ComplexMatrix
    clusters: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _frozen(self.eigenvalues, np.float64))
        object.__setattr__(self, "eigenvectors", _frozen(self.eigenvectors, np.complex128))

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])

    def reconstruct(self) -> ComplexMatrix:
        """Return U diag(p) U^dagger, exactly Hermitian."""
        u = self.eigenvectors
        m = (u * self.eigenvalues) @ u.conj().T
        return 0.5 * (m + m.conj().T)

    def to_eigenbasis(self, a: ComplexMatrix) -> ComplexMatrix:
        """Entries a_jk of ``a`` in this eigenbasis."""
        u = self.eigenvectors
        return u.conj().T @ a @ u

    def from_eigenbasis(self, a: ComplexMatrix) -> ComplexMatrix:
        """Inverse of :meth:`to_eigenbasis`."""
        u = self.eigenvectors
        return u @ a @ u.conj().T

    def cluster_labels(self) -> NDArray[np.int64]:
        labels = np.empty(self.dim, dtype=np.int64)
        for label, members in enumerate(self.clusters):
            labels[list(members)] = label
        return labels

    def same_cluster(self) -> NDArray[np.bool_]:
        """Boolean table, True where indices j and k share a degeneracy cluster."""
        labels = self.cluster_labels()
        return labels[:, None] == labels[None, :]


@dataclass(frozen=True, eq=False)
class PositiveOperator:
    """Invertible positive operator, a point of the open cone P(H)."""

    matrix: ComplexMatrix
    spectrum: SpectralDecomposition

    kind = "positive"

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix, np.complex128))

    @property
    def dim(self) -> int:
        return self.spectrum.dim

    @property
    def trace(self) -> float:
        """Trace as the sum of eigenvalues."""
        return float(np.sum(self.spectrum.eigenvalues))


@dataclass(frozen=True, eq=False)
class DensityState(PositiveOperator):
    """Faithful unit-trace state, a point of S(H)."""

    kind = "density"


class TangentKind(StrEnum):
    """Base space a tangent vector belongs to."""

    STATE = "state-space"
    CONE = "cone"


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Hermitian tangent vector; traceless when attached to S(H)."""

    matrix: ComplexMatrix
    kind: TangentKind = TangentKind.CONE

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix, np.complex128))


@dataclass(frozen=True, eq=False)
class Observable:
    """Self-adjoint operator a defining the expectation value function l_a."""

    matrix: ComplexMatrix

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix, np.complex128))


class Variant(StrEnum):
    """Families of candidate Petz functions."""

    GL_FAMILY = "gl"
    BKM = "bkm"
    TEST_SQUARE = "test:square"
    TEST_IDENTITY = "test:identity"


@dataclass(frozen=True)
class MonotoneFunctionSpec:
    """Symbolic descriptor of a candidate Petz function f, normalized to f(1) = scale."""

    variant: Variant
    kappa: float = 1.0
    scale: float = 1.0
    alias: str | None = None

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale}")

    @classmethod
    def gl(cls, kappa: float, scale: float = 1.0) -> "MonotoneFunctionSpec":
        return cls(Variant.GL_FAMILY, kappa=float(kappa), scale=scale)

    @classmethod
    def bkm(cls, scale: float = 1.0) -> "MonotoneFunctionSpec":
        return cls(Variant.BKM, scale=scale)

    @classmethod
    def bures_helstrom(cls) -> "MonotoneFunctionSpec":
        return cls(Variant.GL_FAMILY, kappa=1.0, alias="bh")

    @classmethod
    def wigner_yanase(cls) -> "MonotoneFunctionSpec":
        return cls(Variant.GL_FAMILY, kappa=0.5, alias="wy")

    @property
    def label(self) -> str:
        """CLI spelling of this spec, e.g. ``gl:0.5``, ``bkm``, ``wy``."""
        if self.alias:
            base = self.alias
        elif self.variant is Variant.GL_FAMILY:
            base = f"gl:{self.kappa:g}"
        else:
            base = self.variant.value
        return base if self.scale == 1.0 else f"{base}*{self.scale:g}"

    @property
    def defined_at_zero(self) -> bool:
        """Polynomial test functions extend to the whole real line."""
        return self.variant in (Variant.TEST_SQUARE, Variant.TEST_IDENTITY)


@dataclass(frozen=True)
class MetricSpec:
    """Monotone metric G = prefactor * Tr(v K^{-1}(w))."""

    function: MonotoneFunctionSpec
    prefactor: float = 1.0

    def __post_init__(self):
        if not self.prefactor > 0:
            raise ValueError(f"prefactor must be positive, got {self.prefactor}")


@dataclass(frozen=True, eq=False)
class PetzSuperoperator:
    """K^f at a point, stored as the eigenbasis coefficient table c_jk = p_k f(p_j / p_k)."""

    base: SpectralDecomposition
    coeffs: RealTable
    spec: MonotoneFunctionSpec

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen(self.coeffs, np.float64))


@dataclass(frozen=True, eq=False)
class GLElement:
    """Invertible matrix g in GL(H)."""

    matrix: ComplexMatrix

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix, np.complex128))


@dataclass(frozen=True, eq=False)
class CotangentElement:
    """Element (U, a) of the cotangent group T*U(H) = U(H) x B_sa(H)."""

    unitary: ComplexMatrix
    a: ComplexMatrix

    def __post_init__(self):
        object.__setattr__(self, "unitary", _frozen(self.unitary, np.complex128))
        object.__setattr__(self, "a", _frozen(self.a, np.complex128))


@dataclass(frozen=True, eq=False)
class LieDirection:
    """Lie algebra direction (a, b); the GL curve is g(t) = exp(t(a - ib)/2)."""

    a: ComplexMatrix
    b: ComplexMatrix

    def __post_init__(self):
        object.__setattr__(self, "a", _frozen(self.a, np.complex128))
        object.__setattr__(self, "b", _frozen(self.b, np.complex128))

    @classmethod
    def along_a(cls, a) -> "LieDirection":
        a = np.asarray(a, dtype=np.complex128)
        return cls(a, np.zeros_like(a))

    @classmethod
    def along_b(cls, b) -> "LieDirection":
        b = np.asarray(b, dtype=np.complex128)
        return cls(np.zeros_like(b), b)


@dataclass(frozen=True)
class DeformationParam:
    """Exponent kappa of phi(x) = x**kappa."""

    kappa: float

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")

    @property
    def exceeds_monotone_range(self) -> bool:
        """True when f_kappa is no longer operator monotone."""
        return self.kappa > 1.0


@dataclass(frozen=True, eq=False)
class MonotonicityWitness:
    """Pair A <= B with f(B) - f(A) having a negative eigenvalue."""

    a: ComplexMatrix
    b: ComplexMatrix
    min_eigenvalue: float
    trial: int


@dataclass(frozen=True)
class SymmetryReport:
    """Residuals of f(t) = t f(1/t) and f(1) = scale over a grid."""

    max_residual: float
    normalization_residual: float
    violations: tuple[float, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class DerivativeAtZero:
    """Numerical limit of f'(x) as x -> 0+."""

    value: float
    diverges: bool
    samples: tuple[tuple[float, float], ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class ContractionReport:
    """Per-trial margins G_rho(v, v) - G_F(rho)(F v, F v)."""

    margins: tuple[float, ...]
    violations: tuple[tuple[int, float], ...]
    skipped: int

    @property
    def min_margin(self) -> float:
        return min(self.margins) if self.margins else 0.0
