"""Input validation utilities."""

import numpy as np

from firstint.utils.exceptions import InputError


def validate_positive(value: float, field: str) -> bool:
    """
    Validate that a numeric option is strictly positive and finite.

    Raises:
        InputError: If the value is not positive

    Example:
        >>> validate_positive(1e-3, "step")
        True
    """
    if not np.isfinite(value) or value <= 0:
        raise InputError(f"{field} must be a positive number, got {value}", pointer=f"/{field}")
    return True


def validate_finite(array: np.ndarray, pointer: str) -> bool:
    """
    Validate that every entry of an array is finite.

    Raises:
        InputError: If any entry is NaN or infinite
    """
    if not np.all(np.isfinite(array)):
        bad = np.argwhere(~np.isfinite(array))[0]
        location = "/".join(str(int(i)) for i in bad)
        raise InputError("Non-finite entry", pointer=f"{pointer}/{location}")
    return True


def validate_square(matrix: np.ndarray, pointer: str) -> bool:
    """
    Validate that a matrix is two-dimensional and square.

    Raises:
        InputError: If the matrix is not square
    """
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InputError(f"Expected a square matrix, got shape {matrix.shape}", pointer=pointer)
    return True
