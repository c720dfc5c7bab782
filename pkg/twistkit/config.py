"""Configuration settings for the twistkit toolkit."""

import logging
import os
from fractions import Fraction
from typing import List, Optional

from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)


def _positive_float(name: str, default: float) -> float:
    """Read a positive float from the environment, falling back on bad values.

    Args:
        name: Environment variable name
        default: Value used when the variable is unset or invalid

    Returns:
        The configured value, or ``default``
    """
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = float(raw)
    except ValueError:
        logger.warning(
            f"Invalid {name} value '{raw}'. Must be a positive number. "
            f"Using default value {default}"
        )
        return default
    if not value > 0 or value != value or value == float("inf"):
        logger.warning(
            f"{name}={value} is outside the valid range (0, inf). "
            f"Using default value {default}"
        )
        return default
    return value


# Numerical integration (flows module)
# Fixed RK4 step; the CLI and API use it whenever no explicit --step is given.
DEFAULT_STEP: float = _positive_float("TWISTKIT_STEP", 1e-3)
PERIOD_TOLERANCE: float = _positive_float("TWISTKIT_PERIOD_TOL", 1e-8)
MAX_ORBIT_TIME: float = _positive_float("TWISTKIT_MAX_TIME", 20.0)

# Density boxes (vlasov module): default box is [-w, w] in every coordinate
_half_width_str = os.getenv("TWISTKIT_BOX_HALF_WIDTH", "1")
try:
    BOX_HALF_WIDTH: Fraction = Fraction(_half_width_str)
    if BOX_HALF_WIDTH <= 0:
        logger.warning(
            f"TWISTKIT_BOX_HALF_WIDTH={_half_width_str} must be positive. "
            f"Using default value 1"
        )
        BOX_HALF_WIDTH = Fraction(1)
except (ValueError, ZeroDivisionError):
    logger.warning(
        f"Invalid TWISTKIT_BOX_HALF_WIDTH value '{_half_width_str}'. "
        f"Must be a rational such as 1 or 3/2. Using default value 1"
    )
    BOX_HALF_WIDTH = Fraction(1)

# Random generation seed
# When set, random polynomials, forms and structure constants are reproducible.
# Example: TWISTKIT_SEED=42
_seed_str = os.getenv("TWISTKIT_SEED", "")
RANDOM_SEED: Optional[int] = None
if _seed_str:
    try:
        RANDOM_SEED = int(_seed_str)
        logger.info(f"TWISTKIT_SEED={RANDOM_SEED}: random generation will be deterministic")
    except ValueError:
        logger.warning(
            f"Invalid TWISTKIT_SEED value '{_seed_str}'. "
            f"Must be an integer. Random generation will be nondeterministic."
        )

# HTTP API
ALLOWED_ORIGINS: List[str] = [
    origin.strip()
    for origin in os.getenv(
        "ALLOWED_ORIGINS", "http://localhost:3000,http://localhost:5173"
    ).split(",")
]
RATE_LIMIT_CHECKS: str = os.getenv("RATE_LIMIT_CHECKS", "60/minute")
# reproduce-paper integrates two orbits at two steps; keep it rarer
RATE_LIMIT_REPRODUCE: str = os.getenv("RATE_LIMIT_REPRODUCE", "10/minute")

# Environment settings
DEBUG: bool = os.getenv("DEBUG", "false").lower() in ("true", "1", "yes")

LOG_LEVEL: str = os.getenv("TWISTKIT_LOG_LEVEL", "WARNING").upper()
if LOG_LEVEL not in ("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG"):
    logger.warning(
        f"Invalid TWISTKIT_LOG_LEVEL '{LOG_LEVEL}'. Using 'WARNING' as default."
    )
    LOG_LEVEL = "WARNING"
if DEBUG:
    LOG_LEVEL = "DEBUG"
