"""Request, response and report schemas shared by the CLI and the HTTP surface."""

from typing import Literal

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from ..config import Tolerances, config
from ..core.functions import parse_spec
from ..core.models import MonotoneFunctionSpec, Variant

ScalarDetail = float | int | str | bool | None


class MatrixPayload(BaseModel):
    """Complex matrix as {"dim", "re", "im"}; ``im`` may be omitted for real matrices."""

    dim: int = Field(..., ge=1, description="Matrix dimension n")
    re: list[list[float]] = Field(..., description="Real part, n rows of n entries")
    im: list[list[float]] | None = Field(default=None, description="Imaginary part")
    kind: Literal["matrix", "density", "positive", "observable", "tangent"] = Field(
        default="matrix", description="Role of the matrix"
    )

    @model_validator(mode="after")
    def check_shape(self) -> "MatrixPayload":
        for name, rows in (("re", self.re), ("im", self.im)):
            if rows is None:
                continue
            if len(rows) != self.dim or any(len(row) != self.dim for row in rows):
                raise ValueError(f"'{name}' must be a {self.dim}x{self.dim} array")
        return self

    def to_array(self) -> np.ndarray:
        re = np.asarray(self.re, dtype=np.float64)
        im = np.zeros_like(re) if self.im is None else np.asarray(self.im, dtype=np.float64)
        return re + 1j * im

    @classmethod
    def from_array(cls, matrix, kind: str = "matrix") -> "MatrixPayload":
        matrix = np.asarray(matrix, dtype=np.complex128)
        return cls(dim=matrix.shape[0], re=matrix.real.tolist(), im=matrix.imag.tolist(), kind=kind)


class SuiteConfig(BaseModel):
    """Configuration of a verification run; echoed into every report except the output and thread settings."""

    dims: list[int] = Field(default_factory=lambda: list(config.DEFAULT_DIMS), min_length=1)
    kappas: list[float] = Field(default_factory=lambda: list(config.DEFAULT_KAPPAS), min_length=1)
    scan_kappas: list[float] = Field(default_factory=lambda: list(config.SCAN_KAPPAS), min_length=1)
    specs: list[str] = Field(default_factory=lambda: list(config.DEFAULT_SPECS), min_length=1)
    trials: int = Field(default=config.DEFAULT_TRIALS, ge=1, description="Trials per cell")
    witness_trials: int = Field(default=config.WITNESS_TRIALS, ge=1)
    seed: int = Field(default=config.DEFAULT_SEED, description="Master seed")
    tolerances: Tolerances = Field(default_factory=Tolerances)
    workers: int = Field(default=config.WORKERS, ge=1, exclude=True, description="Threads evaluating cells")
    include_timing: bool = Field(default=False, description="Serialize wall time into reports")
    format: Literal["json", "csv"] = Field(default="json", exclude=True)
    out: str | None = Field(default=None, exclude=True, description="Report path; standard output if unset")

    @field_validator("dims")
    @classmethod
    def validate_dims(cls, v: list[int]) -> list[int]:
        if any(n < 2 for n in v):
            raise ValueError(f"Dimensions must be at least 2, got {v}")
        return sorted(set(v))

    @field_validator("kappas", "scan_kappas")
    @classmethod
    def validate_kappas(cls, v: list[float]) -> list[float]:
        if any(not np.isfinite(k) or k <= 0 for k in v):
            raise ValueError(f"Deformation parameters must be positive, got {v}")
        return sorted(set(v))

    @field_validator("specs")
    @classmethod
    def validate_specs(cls, v: list[str]) -> list[str]:
        labels = []
        for text in v:
            spec = parse_spec(text)
            if spec.variant in (Variant.TEST_SQUARE, Variant.TEST_IDENTITY):
                raise ValueError(f"{text!r} is a test function, not a Petz function")
            if spec.label not in labels:
                labels.append(spec.label)
        return labels

    def function_specs(self) -> list[MonotoneFunctionSpec]:
        return [parse_spec(text) for text in self.specs]

    def with_tol_scale(self, factor: float) -> "SuiteConfig":
        return self.model_copy(update={"tolerances": self.tolerances.scaled(factor)})


class Violation(BaseModel):
    """A single trial exceeding its tolerance."""

    suite: str
    check: str
    n: int
    kappa: float | None = None
    spec: str | None = None
    trial: int
    residual: float


class CellResult(BaseModel):
    """Aggregate of one check over the trials of one (suite, n, kappa, spec) cell."""

    suite: str
    check: str
    n: int = Field(..., description="Hilbert space dimension; 1 marks scalar checks")
    kappa: float | None = None
    spec: str | None = None
    trials: int
    max_abs_residual: float
    tolerance: float
    violations: int
    skipped: int = 0
    passed: bool
    details: dict[str, ScalarDetail] = Field(default_factory=dict)

    def sort_key(self) -> tuple:
        return (
            self.suite,
            self.n,
            -1.0 if self.kappa is None else self.kappa,
            self.spec or "",
            self.check,
        )


class SuiteReport(BaseModel):
    """Outcome of one suite (or of run-all); byte-identical for identical configs."""

    suite: str
    version: str
    seed: int
    config: SuiteConfig
    cells: list[CellResult] = Field(default_factory=list)
    violations: list[Violation] = Field(default_factory=list)
    passed: bool
    wall_time_s: float | None = Field(default=None, description="Only set with include_timing")


class EvalRequest(BaseModel):
    spec: str = Field(..., description="Function spec, e.g. 'gl:0.5', 'bkm', 'wy'")
    x: float = Field(..., description="Positive argument")

    @field_validator("spec")
    @classmethod
    def validate_spec(cls, v: str) -> str:
        return parse_spec(v).label


class EvalResponse(BaseModel):
    spec: str
    x: float
    value: float


class GradientRequest(BaseModel):
    """Gradient of l_a at a state for the metric prefactor * G_f."""

    spec: str = Field(default="bh")
    prefactor: float = Field(default=1.0, gt=0)
    state: MatrixPayload
    observable: MatrixPayload

    @field_validator("spec")
    @classmethod
    def validate_spec(cls, v: str) -> str:
        return parse_spec(v).label


class GradientResponse(BaseModel):
    spec: str
    prefactor: float
    gradient: MatrixPayload


class HealthResponse(BaseModel):
    """Health check response."""

    status: str = Field(..., description="Service status")
    version: str = Field(..., description="Service version")
