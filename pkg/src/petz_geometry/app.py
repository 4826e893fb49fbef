"""FastAPI application exposing function evaluation, gradients and the verification suites."""

import time

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse

from . import __version__
from .api.schemas import (
    EvalRequest,
    EvalResponse,
    GradientRequest,
    GradientResponse,
    HealthResponse,
    MatrixPayload,
    SuiteConfig,
    SuiteReport,
)
from .config import config
from .core.functions import eval_f, parse_spec
from .core.metric import gradient_field
from .core.models import MetricSpec
from .core.states import density_state, observable_matrix
from .logging_config import get_logger, set_run_id, setup_logging
from .services.suites import SUITES, run_all, run_suite

setup_logging()
logger = get_logger(__name__)

app = FastAPI(
    title=config.APP_NAME,
    description="Monotone quantum metric tensors and the group actions generating their gradients",
    version=__version__,
    debug=config.DEBUG,
)


@app.middleware("http")
async def add_run_id_middleware(request: Request, call_next):
    """Tag each request with a run id."""
    run_id = set_run_id()
    request.state.run_id = run_id

    start_time = time.time()
    response = await call_next(request)
    duration = (time.time() - start_time) * 1000

    logger.debug(f"{request.method} {request.url.path} - {response.status_code} - {duration:.2f}ms")

    response.headers["X-Run-ID"] = run_id
    return response


@app.exception_handler(ValueError)
async def value_error_handler(request: Request, exc: ValueError):
    """Domain errors (every PetzGeometryError is a ValueError)."""
    logger.warning(f"Rejected {request.url.path}: {exc}")
    return JSONResponse(
        status_code=400,
        content={"error": type(exc).__name__, "detail": str(exc)},
    )


@app.exception_handler(Exception)
async def general_exception_handler(request: Request, exc: Exception):
    logger.error(f"Unexpected error: {exc}", exc_info=True)
    return JSONResponse(
        status_code=500,
        content={"error": "Internal server error", "detail": "An unexpected error occurred"},
    )


@app.get("/health", response_model=HealthResponse)
async def health_check():
    return HealthResponse(status="ok", version=__version__)


@app.post("/eval", response_model=EvalResponse)
async def eval_endpoint(request: EvalRequest):
    """
    Evaluate a normalized Petz function.

    - **spec**: "gl:0.5", "bkm", "bh", "wy", optionally with a "*scale" suffix
    - **x**: positive argument
    """
    value = eval_f(parse_spec(request.spec), request.x)
    return EvalResponse(spec=request.spec, x=request.x, value=value)


@app.post("/gradient", response_model=GradientResponse)
def gradient_endpoint(request: GradientRequest):
    """Gradient of l_a at a faithful state for the metric prefactor * G_f."""
    rho = density_state(request.state.to_array())
    a = observable_matrix(request.observable.to_array())
    metric = MetricSpec(parse_spec(request.spec), prefactor=request.prefactor)
    grad = gradient_field(metric, a, rho)
    logger.info(f"Gradient for {request.spec} at n={rho.dim}, prefactor={request.prefactor}")
    return GradientResponse(
        spec=request.spec,
        prefactor=request.prefactor,
        gradient=MatrixPayload.from_array(grad.matrix, kind="tangent"),
    )


@app.post("/suites/{name}", response_model=SuiteReport)
def suite_endpoint(name: str, cfg: SuiteConfig | None = None):
    """Run one suite (or "run-all") and return its report."""
    cfg = cfg or SuiteConfig()
    if name == "run-all":
        return run_all(cfg)
    if name not in SUITES:
        raise HTTPException(status_code=404, detail=f"Unknown suite {name!r}")
    return run_suite(name, cfg)


if __name__ == "__main__":
    import uvicorn

    logger.info(f"Starting {config.APP_NAME} on {config.HOST}:{config.PORT}")
    uvicorn.run(
        "petz_geometry.app:app",
        host=config.HOST,
        port=config.PORT,
        reload=config.DEBUG,
    )
