"""Exception hierarchy shared by all numerical modules."""


class PetzGeometryError(ValueError):
    """Base class for every domain failure raised by petz-geometry."""


class DimensionMismatchError(PetzGeometryError):
    """Operands have incompatible shapes or live on different base spaces."""


class NotHermitianError(PetzGeometryError):
    """A matrix expected to be Hermitian is not, within tolerance."""

    def __init__(self, deviation: float, tolerance: float):
        self.deviation = deviation
        self.tolerance = tolerance
        super().__init__(f"Matrix is not Hermitian: max |A - A^dagger| = {deviation:.3e} > {tolerance:.1e}")


class DomainError(PetzGeometryError):
    """A scalar function is undefined at an eigenvalue or argument."""

    def __init__(self, value: float, message: str = ""):
        self.value = value
        super().__init__(message or f"Function undefined at {value!r}")


class ConditioningError(PetzGeometryError):
    """An operator is too close to singular for the requested computation."""

    def __init__(self, value: float, message: str = ""):
        self.value = value
        super().__init__(message or f"Ill-conditioned input: smallest value {value:.3e}")


class ConvergenceError(PetzGeometryError):
    """The Jacobi eigensolver ran out of sweeps."""

    def __init__(self, residual: float, sweeps: int):
        self.residual = residual
        self.sweeps = sweeps
        super().__init__(
            f"Jacobi eigensolver did not converge after {sweeps} sweeps "
            f"(off-diagonal residual {residual:.3e})"
        )


class UnsupportedVariantError(PetzGeometryError):
    """An operation was requested for a function variant that does not support it."""


class SpecParseError(PetzGeometryError):
    """A monotone function spec string could not be parsed."""


class CompletenessError(PetzGeometryError):
    """Kraus operators do not sum to the identity."""

    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"Kraus operators are not trace preserving (residual {residual:.3e})")


class GradientCheckError(PetzGeometryError):
    """A gradient failed its defining property G(grad, V) = Tr(aV)."""
