"""Configuration management for petz-geometry."""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Tolerances(BaseModel):
    """Immutable tolerance record handed to the verification suites."""

    model_config = ConfigDict(frozen=True)

    analytic: float = Field(default=1e-9, gt=0, description="Analytic-vs-analytic relative residual")
    numeric: float = Field(default=1e-6, gt=0, description="Analytic-vs-finite-difference residual")
    bracket: float = Field(default=1e-5, gt=0, description="Vector-field bracket residual")
    structural: float = Field(default=1e-10, gt=0, description="Structural identities (K, axioms)")
    exact: float = Field(default=1e-12, gt=0, description="Identities exact up to rounding")
    transport: float = Field(default=1e-7, gt=0, description="Expectation transport along flows")
    witness: float = Field(default=1e-8, gt=0, description="Operator monotonicity witness threshold")
    contraction: float = Field(default=1e-8, gt=0, description="CPTP contraction zero band")
    derivative: float = Field(default=1e-3, gt=0, description="f'(0+) limit tolerance")

    def scaled(self, factor: float) -> "Tolerances":
        """Return a copy with every tolerance multiplied by ``factor``."""
        if factor <= 0:
            raise ValueError(f"Tolerance scale must be positive, got {factor}")
        return Tolerances(**{name: value * factor for name, value in self.model_dump().items()})


class Config(BaseSettings):
    """Numerical defaults and service settings, overridable through PETZ_* variables."""

    model_config = SettingsConfigDict(
        env_prefix="PETZ_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Application
    APP_NAME: str = Field(default="petz-geometry", description="Application name")
    HOST: str = Field(default="127.0.0.1", description="Host to bind the HTTP surface to")
    PORT: int = Field(default=8000, description="Port to bind the HTTP surface to")
    DEBUG: bool = Field(default=False, description="Enable debug mode")

    # Logging
    LOG_LEVEL: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = Field(
        default="INFO", description="Logging level"
    )

    # Linear algebra
    HERMITIAN_ATOL: float = Field(default=1e-12, description="Max |A - A^dagger| entry accepted")
    JACOBI_MAX_SWEEPS: int = Field(default=64, description="Cyclic Jacobi sweep limit")
    JACOBI_RTOL: float = Field(
        default=1e-14, description="Off-diagonal Frobenius norm relative to the full norm"
    )
    CLUSTER_RTOL: float = Field(
        default=1e-10, description="Relative gap merging eigenvalues into one degeneracy cluster"
    )

    # States
    POSITIVITY_FLOOR: float = Field(default=1e-12, description="Smallest admissible eigenvalue")
    TRACE_ATOL: float = Field(default=1e-12, description="Allowed |Tr rho - 1| and |Tr v|")
    RANDOM_MIX_WEIGHT: float = Field(
        default=1e-3, description="Weight of I/n mixed into random density matrices"
    )

    # Monotone functions
    SERIES_RADIUS: float = Field(
        default=1e-6, description="|x - 1| below which the series branch of f is used"
    )
    WITNESS_EIG_LOW: float = Field(default=1e-4, description="Lowest sampled eigenvalue of A")
    WITNESS_EIG_HIGH: float = Field(default=10.0, description="Highest sampled eigenvalue of A")

    # Finite differences
    FD_STEP: float = Field(default=1e-5, description="Central difference step")
    FD_OUTER_STEP: float = Field(default=1e-4, description="Outer step for nested differences")

    # Channels
    ENV_DIM: int = Field(default=2, description="Environment dimension of random channels")

    # Suites
    DEFAULT_SEED: int = Field(default=0, description="Master seed")
    DEFAULT_TRIALS: int = Field(default=100, description="Trials per suite cell")
    WITNESS_TRIALS: int = Field(default=2000, description="Trials of the kappa-scan witness search")
    DEFAULT_DIMS: list[int] = Field(default=[2, 3, 4], description="Hilbert space dimensions")
    DEFAULT_KAPPAS: list[float] = Field(
        default=[0.25, 0.5, 0.75, 1.0], description="Deformation parameters"
    )
    SCAN_KAPPAS: list[float] = Field(
        default=[0.1, 0.25, 0.5, 0.75, 1.0, 1.1, 1.25, 1.5, 2.0],
        description="Deformation parameters of the monotonicity boundary scan",
    )
    DEFAULT_SPECS: list[str] = Field(
        default=["bh", "wy", "bkm", "gl:0.3", "gl:0.8"], description="Metric function specs"
    )
    WORKERS: int = Field(default=1, description="Threads used to evaluate suite cells")

    def tolerances(self) -> Tolerances:
        """Default tolerance record."""
        return Tolerances()


config = Config()
