"""Characteristic polynomials and their roots."""

from collections.abc import Callable

import numpy as np

from firstint.utils.exceptions import NumericalError
from firstint.utils.logger import get_logger

logger = get_logger(__name__)

_EPS = float(np.finfo(float).eps)


def characteristic_polynomial(matrix: np.ndarray) -> np.ndarray:
    """
    Monic characteristic polynomial by the Faddeev-LeVerrier recursion.

    Args:
        matrix: Square complex matrix

    Returns:
        Coefficients in descending order, leading coefficient 1

    Example:
        >>> characteristic_polynomial(np.eye(2)).real
        array([ 1., -2.,  1.])
    """
    n = matrix.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0
    identity = np.eye(n, dtype=complex)
    m_k = np.zeros((n, n), dtype=complex)
    for k in range(1, n + 1):
        m_k = matrix @ m_k + coeffs[k - 1] * identity
        coeffs[k] = -np.trace(matrix @ m_k) / k
    return coeffs


def _horner_bound(coeffs: np.ndarray, z: complex) -> float:
    return float(np.polyval(np.abs(coeffs), abs(z)))


def aberth_roots(coeffs: np.ndarray, max_sweeps: int = 500) -> np.ndarray:
    """
    All roots of a polynomial by simultaneous Aberth-Ehrlich iteration.

    Exact zero roots (vanishing trailing coefficients) are split off first.
    A root is accepted once |p(z)| is at the rounding level of the Horner
    sum, so multiple roots stop inside their noise disc.

    Args:
        coeffs: Coefficients in descending order
        max_sweeps: Sweep limit

    Returns:
        Array of roots (with repetition)

    Raises:
        NumericalError: If some root has not converged after max_sweeps
    """
    p = np.trim_zeros(np.asarray(coeffs, dtype=complex), "f")
    p = p / p[0]
    zeros = 0
    while len(p) > 1 and p[-1] == 0:
        p = p[:-1]
        zeros += 1
    degree = len(p) - 1
    if degree == 0:
        return np.zeros(zeros, dtype=complex)

    dp = np.polyder(p)
    center = -p[1] / degree
    shifted = np.abs(np.polyval(p, center))
    radius = max(shifted ** (1.0 / degree), 1e-3) + 1.0
    angles = 2 * np.pi * np.arange(degree) / degree + 0.4
    z = center + radius * np.exp(1j * angles)

    done = np.zeros(degree, dtype=bool)
    for sweep in range(max_sweeps):
        for k in range(degree):
            val = np.polyval(p, z[k])
            if abs(val) <= 8 * degree * _EPS * _horner_bound(p, z[k]):
                done[k] = True
                continue
            done[k] = False
            deriv = np.polyval(dp, z[k])
            diffs = z[k] - np.delete(z, k)
            if deriv == 0 or np.any(diffs == 0):
                z[k] += radius * 1e-3 * np.exp(1j * (k + 1))
                continue
            ratio = val / deriv
            denom = 1.0 - ratio * np.sum(1.0 / diffs)
            z[k] -= ratio / denom if denom != 0 else ratio
        if done.all():
            logger.debug("aberth_converged", degree=degree, sweeps=sweep + 1)
            break
    else:
        residuals = [float(abs(np.polyval(p, r))) for r in z]
        raise NumericalError(
            f"Aberth iteration did not converge after {max_sweeps} sweeps",
            residuals=residuals,
        )
    return np.concatenate([z, np.zeros(zeros, dtype=complex)])


def _derivatives_vanish(coeffs: np.ndarray, c: complex, k: int, rel: float = 1e-8) -> bool:
    d = np.asarray(coeffs, dtype=complex)
    for _ in range(k):
        if abs(np.polyval(d, c)) > rel * _horner_bound(d, c):
            return False
        d = np.polyder(d)
    return True


def _polish(coeffs: np.ndarray, c: complex, k: int, reach: float = 0.0) -> complex:
    # a k-fold root of p is a simple root of its (k-1)-th derivative
    q = np.polyder(coeffs, k - 1) if k > 1 else np.asarray(coeffs)
    dq = np.polyder(q)
    z = c
    for _ in range(30):
        slope = np.polyval(dq, z)
        if slope == 0:
            break
        step = np.polyval(q, z) / slope
        z = z - step
        if abs(step) <= 4 * _EPS * (1.0 + abs(z)):
            break
    if not np.isfinite(z) or abs(z - c) > 2.0 * reach + 1e-8 * (1.0 + abs(c)):
        return complex(c)
    return complex(z)


def _components(points: list[complex], radius: float) -> list[list[complex]]:
    """Single-linkage groups of points closer than radius."""
    groups: list[list[complex]] = []
    for z in points:
        near = [g for g in groups if any(abs(z - w) <= radius for w in g)]
        merged = [z]
        for g in near:
            merged.extend(g)
            groups.remove(g)
        groups.append(merged)
    return groups


def cluster_roots(
    coeffs: np.ndarray,
    roots: np.ndarray,
    cluster_tol: float,
    confirm: Callable[[complex, int], bool] | None = None,
) -> tuple[list[tuple[complex, int]], bool]:
    """
    Group computed roots into distinct eigenvalues with multiplicities.

    Roots of a k-fold zero scatter on a disc of radius about eps^(1/k), so
    grouping starts from single-linkage components at a wide radius. A
    component of k roots is accepted as one k-fold root when confirm(centre, k)
    holds for its centre, the centroid polished by Newton on the (k-1)-th
    derivative. Rejected components are split again at a tenth of the
    radius; below cluster_tol the components are accepted as they are.

    Args:
        coeffs: Polynomial coefficients in descending order
        roots: Roots with repetition, e.g. from aberth_roots
        cluster_tol: Smallest grouping radius
        confirm: Multiplicity test; defaults to vanishing of the first k-1
            derivatives at the centre

    Returns:
        (centre, multiplicity) pairs sorted by (real, imag), and a flag that is
        set when two distinct centres lie within 10 * cluster_tol or a group
        was accepted without confirmation
    """
    coeffs = np.asarray(coeffs, dtype=complex)

    def vanishing(c: complex, k: int) -> bool:
        return _derivatives_vanish(coeffs, c, k)

    accept = confirm or vanishing
    points = [complex(r) for r in roots]
    if not points:
        return [], False

    found: list[tuple[complex, int]] = []
    unconfirmed = False
    radius = max(cluster_tol, 1e-2 * (1.0 + max(abs(z) for z in points)))
    pending = [(g, radius) for g in _components(points, radius)]
    while pending:
        group, radius = pending.pop()
        k = len(group)
        mean = complex(np.mean(group))
        spread = max(abs(g - mean) for g in group)
        centre = _polish(coeffs, mean, k, spread)
        if accept(centre, k):
            found.append((centre, k))
        elif radius > cluster_tol and k > 1:
            finer = max(cluster_tol, radius / 10)
            pending.extend((g, finer) for g in _components(group, finer))
        else:
            unconfirmed = unconfirmed or k > 1
            found.append((centre, k))

    found.sort(key=lambda cm: (round(cm[0].real, 9), round(cm[0].imag, 9)))
    close = any(
        abs(a[0] - b[0]) <= 10 * cluster_tol for i, a in enumerate(found) for b in found[i + 1 :]
    )
    return found, close or unconfirmed
