"""twistkit: exact checks of twisted Poisson structures from magnetic fields."""

from twistkit.errors import (
    IntegrationError,
    ParseError,
    ReductionError,
    StageFailure,
    TwistkitError,
)
from twistkit.models import CounterexampleReport, OrbitIntegral, Report, StageResult

__version__ = "0.1.0"

__all__ = [
    "CounterexampleReport",
    "IntegrationError",
    "OrbitIntegral",
    "ParseError",
    "ReductionError",
    "Report",
    "StageFailure",
    "StageResult",
    "TwistkitError",
]
