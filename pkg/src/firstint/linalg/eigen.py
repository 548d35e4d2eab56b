"""Eigenvalue structure and Jordan chains of small dense matrices."""

from dataclasses import dataclass, field
from math import factorial

import numpy as np

from firstint.linalg.elimination import inf_norm, nullspace, rank, solve_min_norm
from firstint.linalg.polynomial import aberth_roots, characteristic_polynomial, cluster_roots
from firstint.utils.exceptions import InputError, StructuralError
from firstint.utils.helpers import snap, tidy_vector
from firstint.utils.logger import get_logger
from firstint.utils.validators import validate_finite, validate_square

logger = get_logger(__name__)

MAX_DIMENSION = 32

Chain = tuple[np.ndarray, ...]


@dataclass(frozen=True)
class Eigenvalue:
    """A distinct eigenvalue with its algebraic multiplicity and elementary divisors."""

    value: complex
    multiplicity: int
    divisor_degrees: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class EigenStructure:
    """Eigenvalues of one matrix with a Jordan chain per elementary divisor."""

    eigenvalues: tuple[Eigenvalue, ...]
    chains: dict[int, tuple[Chain, ...]]
    tolerance_used: float
    char_poly: np.ndarray
    ambiguous: bool = False
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def divisor_count(self) -> int:
        """Total number of elementary divisors."""
        return sum(len(ev.divisor_degrees) for ev in self.eigenvalues)

    def index_of(self, value: complex, tol: float) -> int | None:
        """Index of the eigenvalue closest to value, if within tol."""
        for i, ev in enumerate(self.eigenvalues):
            if abs(ev.value - value) <= tol * (1.0 + abs(value)):
                return i
        return None


def normalize_vector(vector: np.ndarray) -> np.ndarray:
    """
    Scale a vector so that its leading large entry equals 1.

    The pivot is the lowest index whose magnitude is within 10% of the maximum.

    Example:
        >>> normalize_vector(np.array([0, 2, -2.1]))
        array([ 0.  +0.j,  1.  +0.j, -1.05+0.j])
    """
    vector = np.asarray(vector, dtype=complex)
    mags = np.abs(vector)
    top = float(mags.max()) if mags.size else 0.0
    if top == 0.0:
        return vector
    idx = int(np.argmax(mags >= 0.9 * top))
    return tidy_vector(vector / vector[idx])


def jordan_chain(
    matrix: np.ndarray, value: complex, length: int, head: np.ndarray, tol: float
) -> list[np.ndarray]:
    """
    Extend an eigenvector to a chain with (B - lambda E) nu^k = k * nu^(k-1).

    Each nu^k is the minimum-norm solution of its (singular) system. The head
    is normalized with normalize_vector first.

    Args:
        matrix: Operator matrix B
        value: Eigenvalue lambda
        length: Requested chain length s (>= 1)
        head: Eigenvector nu^0
        tol: Relative tolerance

    Returns:
        [nu^0, ..., nu^(s-1)]

    Raises:
        InputError: If head is not an eigenvector or length < 1
        StructuralError: If the chain cannot be extended to the requested length
    """
    if length < 1:
        raise InputError(f"Chain length must be at least 1, got {length}")
    n = matrix.shape[0]
    shifted = matrix - value * np.eye(n, dtype=complex)
    nu0 = normalize_vector(head)
    residual = float(np.max(np.abs(shifted @ nu0)))
    if residual > tol * (1.0 + inf_norm(matrix)) * 1e3:
        raise InputError(f"Vector is not an eigenvector (residual {residual:.3e})")

    chain = [nu0]
    for k in range(1, length):
        try:
            nxt = solve_min_norm(shifted, k * chain[-1], tol)
        except StructuralError as e:
            raise StructuralError(
                f"Jordan chain stops at length {k} (requested {length})", achieved=k
            ) from e
        chain.append(tidy_vector(nxt))
    return chain


def _unit(v: np.ndarray) -> np.ndarray:
    top = float(np.max(np.abs(v)))
    return v / top if top > 0 else v


def _chains_for(
    matrix: np.ndarray, value: complex, degrees: list[int], tol: float
) -> tuple[list[Chain], list[str]]:
    n = matrix.shape[0]
    shifted = matrix - value * np.eye(n, dtype=complex)
    used: list[np.ndarray] = []
    chains: list[Chain] = []
    notes: list[str] = []

    for s in sorted(set(degrees), reverse=True):
        need = degrees.count(s)
        power = np.linalg.matrix_power(shifted, s)
        for w in nullspace(power, tol):
            if need == 0:
                break
            members = [w]
            for _ in range(s - 1):
                members.append(shifted @ members[-1])
            trial = [_unit(v) for v in used + members]
            if rank(np.column_stack(trial), tol * 1e2) < len(trial):
                continue
            used.extend(members)
            need -= 1

            # top-down chain: nu^k = N^(s-1-k) w * k!/(s-1)!
            top_down = [members[s - 1 - k] * factorial(k) / factorial(s - 1) for k in range(s)]
            head = normalize_vector(top_down[0])
            scale = head[np.argmax(np.abs(head))] / top_down[0][np.argmax(np.abs(head))]
            try:
                chain = jordan_chain(matrix, value, s, head, tol)
            except StructuralError:
                chain = [tidy_vector(v * scale) for v in top_down]
                chain[0] = head
            chains.append(tuple(chain))
        if need:
            notes.append(f"missing {need} chain(s) of length {s} for eigenvalue {value}")
    return chains, notes


def eigen_structure(matrix: np.ndarray, tol: float = 1e-9) -> EigenStructure:
    """
    Eigenvalues, multiplicities, elementary divisors and Jordan chains.

    Eigenvalues are the roots of the Faddeev-LeVerrier characteristic
    polynomial found by Aberth-Ehrlich iteration. A group of k roots becomes
    one eigenvalue when (B - c E)^k has a kernel of dimension k at its polished
    centre c; groups are split down to cluster_tol = max(tol, 1e-7 * ||B||_inf).
    Divisor degrees come from the rank sequence of (B - lambda E)^k at the
    snapped value.

    Args:
        matrix: Square operator matrix, n <= 32
        tol: Relative tolerance

    Returns:
        EigenStructure with eigenvalues sorted by (real, imag)

    Raises:
        InputError: If the matrix is not square, too large or not finite
        NumericalError: If the root iteration does not converge

    Example:
        >>> es = eigen_structure(np.eye(4))
        >>> es.eigenvalues[0].divisor_degrees
        (1, 1, 1, 1)
    """
    matrix = np.asarray(matrix, dtype=complex)
    validate_square(matrix, "")
    validate_finite(matrix, "")
    n = matrix.shape[0]
    if n > MAX_DIMENSION:
        raise InputError(f"Matrix dimension {n} exceeds {MAX_DIMENSION}")

    coeffs = characteristic_polynomial(matrix)
    roots = aberth_roots(coeffs)
    cluster_tol = max(tol, 1e-7 * inf_norm(matrix))
    identity = np.eye(n, dtype=complex)

    def generalized_kernel(centre: complex, k: int) -> bool:
        power = np.linalg.matrix_power(matrix - centre * identity, k)
        return n - rank(power, tol) == k

    clusters, ambiguous = cluster_roots(coeffs, roots, cluster_tol, generalized_kernel)
    if ambiguous:
        logger.warning("eigenvalue_clusters_ambiguous", n=n, cluster_tol=cluster_tol)

    eigenvalues: list[Eigenvalue] = []
    chains: dict[int, tuple[Chain, ...]] = {}
    notes: list[str] = []
    for index, (centre, mult) in enumerate(clusters):
        value = snap(centre, 1e-10, (1, 2))
        if abs(value.imag) <= cluster_tol:
            value = complex(value.real, 0.0)
        shifted = matrix - value * np.eye(n, dtype=complex)
        ranks = [n]
        power = np.eye(n, dtype=complex)
        for _ in range(mult):
            power = power @ shifted
            ranks.append(rank(power, tol))
        at_least = [ranks[k - 1] - ranks[k] for k in range(1, mult + 1)] + [0]
        degrees: list[int] = []
        for s in range(mult, 0, -1):
            degrees.extend([s] * (at_least[s - 1] - at_least[s]))
        if sum(degrees) != mult:
            notes.append(f"rank sequence {ranks} inconsistent with multiplicity {mult}")
            logger.warning("divisor_rank_mismatch", eigenvalue=str(value), ranks=ranks)
            degrees += [1] * (mult - sum(degrees))
        eigenvalues.append(Eigenvalue(value, mult, tuple(degrees)))
        built, chain_notes = _chains_for(matrix, value, degrees, tol)
        chains[index] = tuple(built)
        notes.extend(chain_notes)

    logger.debug(
        "eigen_structure_computed",
        n=n,
        clusters=len(eigenvalues),
        divisors=sum(len(ev.divisor_degrees) for ev in eigenvalues),
    )
    return EigenStructure(
        eigenvalues=tuple(eigenvalues),
        chains=chains,
        tolerance_used=tol,
        char_poly=coeffs,
        ambiguous=ambiguous,
        notes=tuple(notes),
    )
