"""Utility functions and helpers for firstint."""

from firstint.utils.config import Settings, get_settings, load_document
from firstint.utils.exceptions import (
    ConfigurationError,
    DomainError,
    FirstIntegralError,
    InputError,
    NumericalError,
    SolvabilityError,
    StructuralError,
    VerificationError,
)
from firstint.utils.logger import configure_logging, get_logger, level_for, run_context

__all__ = [
    # Exceptions
    "FirstIntegralError",
    "ConfigurationError",
    "InputError",
    "NumericalError",
    "StructuralError",
    "DomainError",
    "SolvabilityError",
    "VerificationError",
    # Logging
    "get_logger",
    "configure_logging",
    "level_for",
    "run_context",
    # Configuration
    "Settings",
    "get_settings",
    "load_document",
]
