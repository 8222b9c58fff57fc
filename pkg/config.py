# File: config.py
"""
/config.py
Configuration management for the application
"""

import os
import logging
from dotenv import load_dotenv

load_dotenv(override=True)

logger = logging.getLogger(__name__)


def get_float(name: str, default: float) -> float:
    """Read a float from the environment, falling back on malformed values"""
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = float(raw)
    except ValueError:
        logger.warning(f"Invalid value for {name}: '{raw}' - using default {default}")
        return default
    if value < 0:
        logger.warning(f"Negative value for {name}: '{raw}' - using default {default}")
        return default
    return value


def get_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        logger.warning(f"Invalid value for {name}: '{raw}' - using default {default}")
        return default


class Config:
    # Logging
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

    # Verification tolerances
    TOL_FEAS = get_float("MARKETCLEAR_TOL_FEAS", 1e-7)
    TOL_GAP = get_float("MARKETCLEAR_TOL_GAP", 1e-6)
    TOL_CS = get_float("MARKETCLEAR_TOL_CS", 1e-6)
    TOL_MONEY = get_float("MARKETCLEAR_TOL_MONEY", 1e-4)
    TOL_SIGN = get_float("MARKETCLEAR_TOL_SIGN", 1e-9)

    # Solver (scipy HiGHS dual simplex by default)
    SOLVER_METHOD = os.getenv("MARKETCLEAR_SOLVER_METHOD", "highs-ds")

    # Output
    OUTPUT_FORMAT = os.getenv("MARKETCLEAR_OUTPUT_FORMAT", "table")
    RECORD_TIMESTAMPS = (
        os.getenv("MARKETCLEAR_RECORD_TIMESTAMPS", "false").lower() == "true"
    )

    # Batch runs
    JOBS = get_int("MARKETCLEAR_JOBS", 1)

    @classmethod
    def tolerances(cls):
        from app.models.solution import Tolerances

        return Tolerances(
            feas=cls.TOL_FEAS,
            gap=cls.TOL_GAP,
            cs=cls.TOL_CS,
            money=cls.TOL_MONEY,
            sign=cls.TOL_SIGN,
        )
