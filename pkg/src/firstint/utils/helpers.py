"""General helper functions."""

from collections.abc import Iterable, Sequence
from typing import Any

import numpy as np


def format_duration(milliseconds: float) -> str:
    """
    Format duration in milliseconds to human-readable string.

    Example:
        >>> format_duration(1500)
        '1.50s'
        >>> format_duration(500)
        '500ms'
    """
    if milliseconds < 1000:
        return f"{milliseconds:.0f}ms"
    return f"{milliseconds / 1000:.2f}s"


def format_real(value: float) -> str:
    """
    Format a real number so that parsing the text gives back the same float.

    Integral values are written without a fractional part.

    Example:
        >>> format_real(2.0)
        '2'
        >>> format_real(-0.5)
        '-0.5'
    """
    if value == 0:
        return "0"
    if float(value).is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))


def format_complex(value: complex) -> str:
    """
    Format a complex scalar in the expression grammar.

    Real values render as plain numbers, others as "(re,im)".

    Example:
        >>> format_complex(1 + 2j)
        '(1,2)'
        >>> format_complex(3 + 0j)
        '3'
    """
    value = complex(value)
    if value.imag == 0:
        return format_real(value.real)
    return f"({format_real(value.real)},{format_real(value.imag)})"


def snap(value: complex, tol: float = 1e-10, denominators: Sequence[int] = (1,)) -> complex:
    """
    Round real and imaginary parts to nearby rationals with small denominators.

    Args:
        value: Scalar to snap
        tol: Absolute tolerance, scaled by 1 + |part|
        denominators: Denominators tried in order

    Returns:
        Snapped scalar (unchanged parts that are not close to any candidate)

    Example:
        >>> snap(0.9999999999999 + 1e-14j)
        (1+0j)
    """
    parts = []
    for part in (value.real, value.imag):
        snapped = part
        for q in denominators:
            candidate = round(part * q) / q
            if abs(candidate - part) <= tol * (1.0 + abs(part)):
                snapped = candidate
                break
        parts.append(snapped + 0.0)
    return complex(parts[0], parts[1])


def tidy_vector(vector: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Snap near-integer components and drop imaginary noise from a vector."""
    out = np.array([snap(complex(v), tol) for v in vector], dtype=complex)
    scale = 1.0 + float(np.max(np.abs(out))) if out.size else 1.0
    out.real[np.abs(out.real) <= tol * scale] = 0.0
    out.imag[np.abs(out.imag) <= tol * scale] = 0.0
    return out


def complex_to_json(value: complex) -> float | list[float]:
    """Encode a complex scalar as a number or a [re, im] pair."""
    value = complex(value)
    if value.imag == 0:
        return float(value.real)
    return [float(value.real), float(value.imag)]


def vector_to_json(vector: Iterable[complex]) -> list[Any]:
    """Encode a complex vector entrywise with complex_to_json."""
    return [complex_to_json(v) for v in vector]
