"""Core package."""

from .exceptions import (
    CKPException,
    ConfigurationError,
    GradingError,
    MatrixError,
    PartitionError,
    SeriesError,
    ValidationError,
    WindowError,
)
from .logging import get_logger, setup_logging

__all__ = [
    "CKPException",
    "ConfigurationError",
    "GradingError",
    "MatrixError",
    "PartitionError",
    "SeriesError",
    "ValidationError",
    "WindowError",
    "get_logger",
    "setup_logging",
]
