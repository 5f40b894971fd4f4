"""
Utility modules for the plexpand package.

This module contains utility functions and helpers used throughout the package.
"""

from .logging import LoggingUtils
from .vectors import as_vector, inf_norm

__all__ = ["LoggingUtils", "as_vector", "inf_norm"]
