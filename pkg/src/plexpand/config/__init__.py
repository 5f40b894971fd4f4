"""
Configuration module for the plexpand package.

This module contains all configuration settings and constants used throughout the package.
"""

from .settings import (
    DEDUP_TOLERANCE,
    ENUMERATION_CAP,
    JOBS,
    MODULUS_MAX_ITERATIONS,
    MODULUS_TOLERANCE,
    NEWTON_MAX_ITERATIONS,
    NEWTON_RESIDUAL_TOLERANCE,
    NEWTON_STEP_TOLERANCE,
    RATE_MIN_STEP_FACTOR,
    ROOT_RESIDUAL_TOLERANCE,
    SAMPLING_POINTS,
    SERIES_KERNEL_ORDER,
    SERIES_THRESHOLD,
    SIGN_TOLERANCE,
    STAGNATION_ULPS,
)

__all__ = [
    "JOBS",
    "ENUMERATION_CAP",
    "SIGN_TOLERANCE",
    "DEDUP_TOLERANCE",
    "ROOT_RESIDUAL_TOLERANCE",
    "MODULUS_MAX_ITERATIONS",
    "MODULUS_TOLERANCE",
    "NEWTON_MAX_ITERATIONS",
    "NEWTON_RESIDUAL_TOLERANCE",
    "NEWTON_STEP_TOLERANCE",
    "STAGNATION_ULPS",
    "RATE_MIN_STEP_FACTOR",
    "SERIES_THRESHOLD",
    "SERIES_KERNEL_ORDER",
    "SAMPLING_POINTS",
]
