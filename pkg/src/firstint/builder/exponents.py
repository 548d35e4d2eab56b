"""Exponent systems: nullspaces of rate matrices, rationalized."""

from itertools import combinations

import numpy as np

from firstint.linalg.elimination import nullspace, rank
from firstint.utils.exceptions import StructuralError
from firstint.utils.helpers import tidy_vector
from firstint.utils.logger import get_logger

logger = get_logger(__name__)

RATIONAL_TOL = 1e-9
MAX_NUMERATOR = 64
MAX_DENOMINATOR = 12
MAX_COMBINATIONS = 256


def _near_integers(values: np.ndarray, tol: float) -> bool:
    parts = np.concatenate([values.real, values.imag])
    return bool(np.all(np.abs(parts - np.round(parts)) <= tol)) and bool(
        np.all(np.abs(np.round(parts)) <= MAX_NUMERATOR)
    )


def rationalize(h: np.ndarray, tol: float = RATIONAL_TOL) -> np.ndarray:
    """
    Scale a vector so its entries become small integers when possible.

    The vector is divided by its smallest nonzero entry (in magnitude); then
    multipliers 1..12 are tried until every real and imaginary part lies
    within tol of an integer of magnitude at most 64.

    Example:
        >>> rationalize(np.array([0.5, -1.0, 1.5]))
        array([ 1.+0.j, -2.+0.j,  3.+0.j])
    """
    h = np.asarray(h, dtype=complex)
    magnitudes = np.abs(h)
    nonzero = magnitudes > tol * (1.0 + float(magnitudes.max(initial=0.0)))
    if not nonzero.any():
        return h
    pivot = h[np.flatnonzero(nonzero)[np.argmin(magnitudes[nonzero])]]
    scaled = np.where(nonzero, h / pivot, 0.0)
    for q in range(1, MAX_DENOMINATOR + 1):
        candidate = scaled * q
        if _near_integers(candidate, tol * q):
            return np.round(candidate.real) + 1j * np.round(candidate.imag) + 0.0
    return tidy_vector(scaled, tol)


def normalize_sign(h: np.ndarray) -> np.ndarray:
    """Flip a real vector so that its first nonzero entry is positive."""
    first = next((v for v in h if v != 0), 0)
    return -h if complex(first).real < 0 else h


def exponent_solution(lambda_matrix: np.ndarray, real: bool, tol: float = 1e-9) -> np.ndarray:
    """
    Nontrivial exponent vector h with sum_k lambda[j, k] h_k = 0 for every row j.

    Args:
        lambda_matrix: Rows are independent variables, columns the participating factors
        real: Solve over the reals (the matrix must then be real)
        tol: Relative pivot tolerance

    Returns:
        The first nullspace basis vector, rationalized (sign-normalized when real)

    Raises:
        StructuralError: If the nullspace is trivial

    Example:
        >>> exponent_solution(np.array([[0.0]]), real=True)
        array([1.+0.j])
    """
    matrix = np.atleast_2d(np.asarray(lambda_matrix, dtype=complex))
    if real:
        matrix = matrix.real.astype(complex)
    basis = nullspace(matrix, tol)
    if not basis:
        raise StructuralError(
            f"Exponent system of shape {matrix.shape} has only the trivial solution", achieved=0
        )
    h = rationalize(basis[0])
    if real:
        h = normalize_sign(h.real.astype(complex))
    return h


def null_combinations(
    rates: np.ndarray, real: bool, tol: float = 1e-9, exhaustive: bool = False
) -> list[np.ndarray]:
    """
    Coefficient vectors c with rates @ c = 0, rationalized.

    By default these are the nullspace basis read off the RREF: each vector is
    supported on the pivot columns and one free column. With ``exhaustive``
    every minimal dependent column subset is tried in lexicographic order, up
    to MAX_COMBINATIONS vectors.

    Args:
        rates: Rate matrix, rows are independent variables, columns the factors
        real: Whether the combination must be real
        tol: Relative pivot tolerance
        exhaustive: Enumerate minimal column subsets instead of the RREF basis

    Returns:
        Coefficient vectors over all columns (zeros outside the support)
    """
    matrix = np.atleast_2d(np.asarray(rates, dtype=complex))
    if real:
        matrix = matrix.real.astype(complex)
    cols = matrix.shape[1]
    if cols == 0:
        return []

    def finish(v: np.ndarray) -> np.ndarray:
        v = rationalize(v)
        return normalize_sign(v.real.astype(complex)) if real else v

    if not exhaustive:
        return [finish(v) for v in nullspace(matrix, tol)]

    found: list[np.ndarray] = []
    full_rank = rank(matrix, tol)
    for size in range(1, full_rank + 2):
        for subset in combinations(range(cols), size):
            sub = matrix[:, list(subset)]
            if rank(sub, tol) != size - 1:
                continue
            kernel = nullspace(sub, tol)
            if len(kernel) != 1 or np.any(np.abs(kernel[0]) <= tol):
                continue
            v = np.zeros(cols, dtype=complex)
            v[list(subset)] = kernel[0]
            found.append(finish(v))
            if len(found) >= MAX_COMBINATIONS:
                logger.warning("exponent_combinations_capped", cap=MAX_COMBINATIONS)
                return found
    return found
