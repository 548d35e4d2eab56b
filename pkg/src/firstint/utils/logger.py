"""Structured logging for firstint.

Events go to stderr so that command output on stdout stays machine-readable.
Numeric fields are reduced to plain JSON values before rendering: numpy
scalars become Python numbers, complex values become [re, im] pairs and
arrays become nested lists.
"""

import logging
import sys
from collections.abc import Iterator, MutableMapping
from contextlib import contextmanager
from typing import Any, cast

import numpy as np
import structlog

LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _plain(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, complex):
        return value.real if value.imag == 0 else [value.real, value.imag]
    if isinstance(value, tuple | list):
        return [_plain(v) for v in value]
    return value


def plain_numbers(
    _logger: Any, _method: str, event_dict: MutableMapping[str, Any]
) -> MutableMapping[str, Any]:
    """structlog processor replacing numpy and complex values by JSON-friendly ones."""
    for key, value in event_dict.items():
        event_dict[key] = _plain(value)
    return event_dict


def level_for(verbose: int, default: str = "WARNING") -> str:
    """
    Log level for a count of -v flags.

    Example:
        >>> level_for(0, "ERROR"), level_for(1), level_for(2)
        ('ERROR', 'INFO', 'DEBUG')
    """
    if verbose >= 2:
        return "DEBUG"
    if verbose == 1:
        return "INFO"
    return default.upper()


def configure_logging(log_level: str = "WARNING", json_logs: bool = False) -> None:
    """
    Configure structured logging on stderr.

    Args:
        log_level: One of DEBUG, INFO, WARNING, ERROR, CRITICAL
        json_logs: Render one JSON object per line instead of console text
    """
    level = log_level.upper()
    if level not in LEVELS:
        level = "WARNING"
    logging.basicConfig(
        format="%(message)s",
        stream=sys.stderr,
        level=getattr(logging, level),
        force=True,
    )

    processors: list[Any] = [
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.filter_by_level,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.format_exc_info,
        plain_numbers,
    ]
    renderer = (
        structlog.processors.JSONRenderer(sort_keys=True)
        if json_logs
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    structlog.configure(
        processors=[*processors, renderer],
        wrapper_class=structlog.stdlib.BoundLogger,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        # re-configuration by the CLI must reach module-level loggers
        cache_logger_on_first_use=False,
    )


@contextmanager
def run_context(**fields: Any) -> Iterator[None]:
    """
    Attach fields (system name, seed, ...) to every event logged inside the block.

    Example:
        >>> with run_context(system="sys_3_2", seed=0):
        ...     get_logger(__name__).info("analysis_started")
    """
    with structlog.contextvars.bound_contextvars(**fields):
        yield


def get_logger(name: str) -> structlog.stdlib.BoundLogger:
    """Logger for a module, used as ``logger = get_logger(__name__)``."""
    return cast(structlog.stdlib.BoundLogger, structlog.get_logger(name))


configure_logging()
