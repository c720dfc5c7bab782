"""FastAPI application for the twistkit checks service.

Exposes the command-line checks (``twistkit.checks``) over HTTP. Startup
refuses to proceed when the recorded sign conventions disagree with their
recomputation from the worked example.
"""

import logging
import time
from contextlib import asynccontextmanager
from typing import Any, AsyncGenerator, Dict

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from slowapi import Limiter, _rate_limit_exceeded_handler
from slowapi.errors import RateLimitExceeded
from slowapi.util import get_remote_address
from starlette.responses import Response

from twistkit import __version__
from twistkit.config import ALLOWED_ORIGINS, DEBUG, DEFAULT_STEP, LOG_LEVEL
from twistkit.magnetic import calibrate_signs, recorded_signs
from twistkit.models import Report

from .routes import checks

logger = logging.getLogger(__name__)


def validate_config() -> None:
    """Check CORS origins and the recorded signs against calibration.

    Raises:
        RuntimeError: If either is inconsistent
    """
    errors: list[str] = []
    if not ALLOWED_ORIGINS or not all(ALLOWED_ORIGINS):
        errors.append("ALLOWED_ORIGINS contains an empty origin.")

    calibrated = calibrate_signs()
    recorded = recorded_signs()
    if calibrated != recorded:
        errors.append(f"Recorded signs {recorded} differ from calibration {calibrated}.")

    if errors:
        error_msg = "Configuration validation failed:\n  - " + "\n  - ".join(errors)
        logger.error(error_msg)
        raise RuntimeError(error_msg)


@asynccontextmanager
async def lifespan(app: FastAPI) -> AsyncGenerator[None, None]:
    logging.basicConfig(level=LOG_LEVEL)
    validate_config()
    logger.info(f"twistkit API {__version__} ready (RK4 step {DEFAULT_STEP}, debug {DEBUG})")
    yield
    logger.info("twistkit API shut down")


app = FastAPI(
    title="twistkit API",
    description="Exact checks of twisted Poisson structures and the Vlasov bracket",
    version=__version__,
    lifespan=lifespan,
)

if DEBUG:
    logger.warning("DEBUG is enabled; error details are returned to clients")

# Per client IP; over the limit the client gets 429.
limiter = Limiter(key_func=get_remote_address)
app.state.limiter = limiter
app.add_exception_handler(RateLimitExceeded, _rate_limit_exceeded_handler)

app.add_middleware(
    CORSMiddleware,
    allow_origins=ALLOWED_ORIGINS,
    allow_methods=["GET", "POST"],
    allow_headers=["Content-Type"],
)


@app.middleware("http")
async def add_response_headers(request: Request, call_next) -> Response:
    """nosniff plus the processing time; Schouten squares on large inputs take seconds."""
    start_time = time.perf_counter()
    response = await call_next(request)
    response.headers["X-Content-Type-Options"] = "nosniff"
    response.headers["X-Process-Time"] = f"{time.perf_counter() - start_time:.4f}"
    return response


app.include_router(checks.router)


@app.get("/health", tags=["Health"])
async def health_check() -> Dict[str, str]:
    return {"status": "healthy"}


@app.get("/api/schema", tags=["Health"])
async def report_schema() -> Dict[str, Any]:
    """JSON schema of the report object returned by every check."""
    return Report.model_json_schema(by_alias=True)
