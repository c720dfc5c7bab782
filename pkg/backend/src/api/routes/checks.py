"""Check endpoints.

Every check of ``twistkit.checks`` is available as ``POST /api/checks/{check}``
with a ``CheckRequest`` body; the response is a ``Report`` with ``pass`` as the
JSON key of the verdict. Input errors map to 422, unknown checks to 404.

All endpoints have rate limiting applied.
"""

import logging
from typing import List

from fastapi import APIRouter, HTTPException, Request
from pydantic import ValidationError
from slowapi import Limiter
from slowapi.util import get_remote_address
from starlette.concurrency import run_in_threadpool

from twistkit.checks import CHECKS, CheckRequest, run
from twistkit.config import RATE_LIMIT_CHECKS, RATE_LIMIT_REPRODUCE
from twistkit.errors import IntegrationError, ReductionError, TwistkitError
from twistkit.models import Report

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api/checks", tags=["Checks"])

# Decorator-level limiter; the application limiter lives in main.py.
limiter = Limiter(key_func=get_remote_address)


async def _run_check(check: str, payload: CheckRequest) -> Report:
    if check not in CHECKS:
        raise HTTPException(status_code=404, detail=f"Unknown check '{check}'")
    try:
        # sympy work is CPU bound; keep it off the event loop
        return await run_in_threadpool(run, check, payload)
    except (TwistkitError, ValidationError) as e:
        logger.info(f"Rejected {check} request: {e}")
        raise HTTPException(status_code=422, detail=str(e))
    except (IntegrationError, ReductionError) as e:
        logger.warning(f"{check} could not complete: {e}")
        raise HTTPException(status_code=422, detail=str(e))


@router.get("", response_model=List[str])
async def list_checks() -> List[str]:
    """Names accepted by ``POST /api/checks/{check}``.

    Example:
        GET /api/checks
    """
    return sorted(CHECKS)


@router.post("/reproduce-paper", response_model=Report, response_model_by_alias=True)
@limiter.limit(RATE_LIMIT_REPRODUCE)
async def reproduce_paper(request: Request, payload: CheckRequest) -> Report:
    """Run the monopole counterexample chain.

    Without ``B`` the worked example runs against its anchors. A failing
    stage gives ``pass: false`` with ``meta.failed_stage``, not an HTTP error.

    Rate limit: RATE_LIMIT_REPRODUCE (default 10 requests per minute per IP).

    Example:
        POST /api/checks/reproduce-paper  {}
        POST /api/checks/reproduce-paper  {"B": "x3*dx1^dx2"}
    """
    return await _run_check("reproduce-paper", payload)


@router.post("/{check}", response_model=Report, response_model_by_alias=True)
@limiter.limit(RATE_LIMIT_CHECKS)
async def run_check(request: Request, check: str, payload: CheckRequest) -> Report:
    """Run one check by name.

    Rate limit: RATE_LIMIT_CHECKS (default 60 requests per minute per IP).

    Args:
        request: FastAPI request object (for rate limiting)
        check: Check name, e.g. ``check-twisted``
        payload: Check inputs in the text grammar

    Example:
        POST /api/checks/schouten  {"B": "x2^2*dx2^dx3 + x1*x2*dx1^dx3"}
        POST /api/checks/jacobiator  {"B": "x3*dx1^dx2", "f": "p1", "g": "p2", "h": "p3"}
    """
    return await _run_check(check, payload)
