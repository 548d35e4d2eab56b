"""Gaussian elimination with a pivot tolerance: rref, rank, nullspace, consistent solves."""

import numpy as np

from firstint.utils.exceptions import InputError, StructuralError
from firstint.utils.validators import validate_finite


def inf_norm(matrix: np.ndarray) -> float:
    """Maximum absolute row sum (0 for empty input)."""
    matrix = np.atleast_2d(matrix)
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.sum(np.abs(matrix), axis=1)))


def as_cmatrix(data: object, pointer: str = "") -> np.ndarray:
    """
    Convert nested numbers into a finite complex matrix.

    Raises:
        InputError: If the data is not two-dimensional or has non-finite entries
    """
    try:
        matrix = np.array(data, dtype=complex)
    except (TypeError, ValueError) as e:
        raise InputError(f"Not a numeric matrix: {e}", pointer=pointer or None) from e
    if matrix.ndim != 2:
        raise InputError(f"Expected a matrix, got {matrix.ndim} dimensions", pointer=pointer)
    validate_finite(matrix, pointer)
    return matrix


def rref(matrix: np.ndarray, tol: float) -> tuple[np.ndarray, tuple[int, ...]]:
    """
    Reduced row echelon form with partial pivoting in ascending column order.

    A column is a pivot column when its largest remaining entry exceeds
    tol * (1 + ||M||_inf); smaller entries are treated as zero.

    Args:
        matrix: Input matrix (not modified)
        tol: Relative pivot tolerance

    Returns:
        The reduced matrix and the tuple of pivot columns
    """
    a = np.array(matrix, dtype=complex)
    rows, cols = a.shape
    threshold = tol * (1.0 + inf_norm(a))
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        p = r + int(np.argmax(np.abs(a[r:, c])))
        if abs(a[p, c]) <= threshold:
            a[r:, c] = 0.0
            continue
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] = a[r] / a[r, c]
        others = np.arange(rows) != r
        a[others] -= np.outer(a[others, c], a[r])
        a[others, c] = 0.0
        pivots.append(c)
        r += 1
    return a, tuple(pivots)


def rank(matrix: np.ndarray, tol: float) -> int:
    """Number of RREF pivots above the tolerance."""
    matrix = np.atleast_2d(matrix)
    if matrix.size == 0:
        return 0
    return len(rref(matrix, tol)[1])


def nullspace(matrix: np.ndarray, tol: float) -> list[np.ndarray]:
    """
    Kernel basis read off the RREF.

    Free columns are taken in ascending order; each basis vector has its free
    variable set to 1, the other free variables 0 and the pivot variables
    back-substituted.

    Args:
        matrix: Finite complex matrix
        tol: Relative pivot tolerance (> 0)

    Returns:
        Basis vectors; empty when the matrix has full column rank

    Raises:
        InputError: If the matrix has non-finite entries or tol is not positive

    Example:
        >>> nullspace(np.zeros((3, 3)), 1e-9)[0]
        array([1.+0.j, 0.+0.j, 0.+0.j])
    """
    if tol <= 0:
        raise InputError(f"tol must be positive, got {tol}", pointer="/tol")
    matrix = np.atleast_2d(np.asarray(matrix, dtype=complex))
    validate_finite(matrix, "")
    reduced, pivots = rref(matrix, tol)
    cols = matrix.shape[1]
    basis = []
    for free in (c for c in range(cols) if c not in pivots):
        v = np.zeros(cols, dtype=complex)
        v[free] = 1.0
        for i, pc in enumerate(pivots):
            v[pc] = -reduced[i, free]
        basis.append(v)
    return basis


def solve_min_norm(matrix: np.ndarray, rhs: np.ndarray, tol: float) -> np.ndarray:
    """
    Minimum-norm solution of a consistent, possibly singular, system.

    The particular solution comes from the RREF of the augmented matrix; its
    component along the kernel is then projected out.

    Raises:
        StructuralError: If the system is inconsistent within tolerance
    """
    matrix = np.asarray(matrix, dtype=complex)
    cols = matrix.shape[1]
    augmented = np.column_stack([matrix, np.asarray(rhs, dtype=complex)])
    reduced, pivots = rref(augmented, tol)
    if cols in pivots:
        raise StructuralError("Linear system is inconsistent", achieved=len(pivots) - 1)
    x = np.zeros(cols, dtype=complex)
    for i, pc in enumerate(pivots):
        x[pc] = reduced[i, cols]
    kernel = nullspace(matrix, tol)
    if kernel:
        basis = np.column_stack(kernel)
        gram = basis.conj().T @ basis
        x = x - basis @ np.linalg.solve(gram, basis.conj().T @ x)
    return x
