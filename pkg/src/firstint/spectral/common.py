"""Common eigenvectors of commuting matrix families and their Jordan chains."""

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field, replace

import numpy as np

from firstint.linalg.eigen import EigenStructure, eigen_structure, jordan_chain, normalize_vector
from firstint.linalg.elimination import inf_norm, rank
from firstint.systems.frobenius import commutator_residual
from firstint.systems.spec import FieldKind, SystemKind, SystemSpec
from firstint.utils.exceptions import InputError, SolvabilityError, StructuralError
from firstint.utils.helpers import complex_to_json, snap, tidy_vector, vector_to_json
from firstint.utils.logger import get_logger

logger = get_logger(__name__)

Chain = tuple[np.ndarray, ...]


@dataclass(frozen=True, eq=False)
class EigenTuple:
    """
    A common eigenvector with its eigenvalue under every operator.

    Attributes:
        vector: Normalized common eigenvector nu
        lambdas: Eigenvalue under each operator (2m of them for R-linear systems)
        rates: Eigenvalue along each real independent variable
        is_real: Real vector and real eigenvalues
        conjugate_partner: Index of the tuple with conjugated data, if any
        chain: Jordan chain nu^0 .. nu^(s-1) headed by nu (just (nu,) without one)
        chain_matrix: Operator the chain belongs to
        unpaired: Complex tuple of a real system without a conjugate partner
    """

    vector: np.ndarray
    lambdas: tuple[complex, ...]
    rates: tuple[complex, ...]
    is_real: bool
    conjugate_partner: int | None = None
    chain: Chain = ()
    chain_matrix: int = 0
    unpaired: bool = False

    @property
    def is_upper(self) -> bool:
        """Whether the first non-real eigenvalue lies in the upper half-plane."""
        first = next((v for v in self.lambdas if v.imag != 0), 0j)
        return first.imag > 0

    @property
    def degree(self) -> int:
        """Length of the attached chain."""
        return max(len(self.chain), 1)

    def to_dict(self) -> dict[str, object]:
        return {
            "vector": vector_to_json(self.vector),
            "lambdas": [complex_to_json(v) for v in self.lambdas],
            "rates": [complex_to_json(v) for v in self.rates],
            "is_real": self.is_real,
            "conjugate_partner": self.conjugate_partner,
            "chain": [vector_to_json(v) for v in self.chain[1:]],
            "chain_matrix": self.chain_matrix,
            "unpaired": self.unpaired,
        }


@dataclass(frozen=True, eq=False)
class CommonEigenData:
    """Common eigen-tuples of a commuting family with their pivot matrix."""

    tuples: tuple[EigenTuple, ...]
    pivot: int
    eigen: tuple[EigenStructure, ...]
    notes: tuple[str, ...] = field(default_factory=tuple)

    def representatives(self) -> tuple[int, ...]:
        """Indices with one member per conjugate pair (the upper half-plane one)."""
        return tuple(
            i
            for i, tup in enumerate(self.tuples)
            if tup.conjugate_partner is None or tup.is_upper
        )


def select_pivot_matrix(eigen: Sequence[EigenStructure]) -> int:
    """
    Index of the matrix with the fewest elementary divisors (lowest index on ties).

    Example:
        >>> select_pivot_matrix([eigen_structure(np.eye(2)), eigen_structure(np.diag([1, 2]))])
        0
    """
    counts = [es.divisor_count for es in eigen]
    return counts.index(min(counts))


def _keep_basis(
    restriction: np.ndarray, value: complex, heads: list[np.ndarray], tol: float
) -> list[np.ndarray]:
    # basis columns already in the eigenspace come first, so chain heads survive the split
    k = restriction.shape[0]
    shifted = restriction - value * np.eye(k, dtype=complex)
    bound = tol * 1e3 * (1.0 + inf_norm(restriction))
    units = np.eye(k, dtype=complex)
    kept = [units[i] for i in range(k) if float(np.max(np.abs(shifted[:, i]))) <= bound]
    kept = kept[: len(heads)]
    for h in heads:
        if len(kept) == len(heads):
            break
        if rank(np.column_stack([*kept, h]), 1e-8) > len(kept):
            kept.append(h)
    return kept


def _split(
    basis: np.ndarray, others: list[np.ndarray], tol: float, notes: list[str]
) -> list[np.ndarray]:
    # restrict the next operator to span(basis) and separate its eigenspaces
    k = basis.shape[1]
    if k == 1 or not others:
        return [basis[:, i] for i in range(k)]
    op, rest = others[0], others[1:]
    restriction = np.linalg.lstsq(basis, op @ basis, rcond=None)[0]
    scalar = complex(np.trace(restriction)) / k
    if inf_norm(restriction - scalar * np.eye(k)) <= tol * (1.0 + inf_norm(restriction)):
        return _split(basis, rest, tol, notes)
    structure = eigen_structure(restriction, tol)
    found: list[np.ndarray] = []
    for idx, ev in enumerate(structure.eigenvalues):
        heads = _keep_basis(restriction, ev.value, [c[0] for c in structure.chains[idx]], tol)
        if any(d > 1 for d in ev.divisor_degrees):
            notes.append(
                f"defective restriction for eigenvalue {ev.value}: divisors {ev.divisor_degrees}"
            )
        if heads:
            found.extend(_split(basis @ np.column_stack(heads), rest, tol, notes))
    return found


def _rayleigh(op: np.ndarray, v: np.ndarray) -> complex:
    return complex(np.vdot(v, op @ v) / np.vdot(v, v))


def _override_for(overrides: Mapping[complex, int] | None, value: complex) -> int | None:
    for key, j in (overrides or {}).items():
        if abs(complex(key) - value) <= 1e-7 * (1.0 + abs(value)):
            return j
    return None


def _snap_value(value: complex, tol: float) -> complex:
    value = snap(value, tol, (1, 2))
    return complex(value.real + 0.0, value.imag + 0.0)


def _attach_chain(
    vector: np.ndarray,
    lambdas: tuple[complex, ...],
    operators: Sequence[np.ndarray],
    eigen: Sequence[EigenStructure],
    order: Sequence[int],
    tol: float,
) -> tuple[Chain, int]:
    for j in order:
        es = eigen[j]
        idx = es.index_of(lambdas[j], max(tol, 1e-7))
        if idx is None:
            continue
        for chain in es.chains[idx]:
            if len(chain) > 1 and np.allclose(chain[0], vector, atol=1e-8):
                return chain, j
        length = max(es.eigenvalues[idx].divisor_degrees)
        while length > 1:
            try:
                return tuple(jordan_chain(operators[j], lambdas[j], length, vector, tol)), j
            except StructuralError as e:
                length = e.achieved if e.achieved is not None and e.achieved < length else 1
            except InputError:
                break
    return (vector,), order[0]


def direction_rates(spec: SystemSpec, lambdas: tuple[complex, ...]) -> tuple[complex, ...]:
    """Rates along the real independent variables from per-operator eigenvalues."""
    if spec.kind is not SystemKind.RLINEAR:
        return lambdas
    m = spec.m
    along_re = [lambdas[j] + lambdas[m + j] for j in range(m)]
    along_im = [1j * (lambdas[j] - lambdas[m + j]) for j in range(m)]
    return tuple(along_re + along_im)


def _realify(v: np.ndarray, operators: Sequence[np.ndarray]) -> np.ndarray:
    # real operators with real eigenvalues have real eigenvectors
    lambdas = [_rayleigh(op, v) for op in operators]
    if np.all(v.imag == 0) or any(abs(lam.imag) > 1e-9 * (1 + abs(lam)) for lam in lambdas):
        return v
    part = v.real if np.linalg.norm(v.real) >= np.linalg.norm(v.imag) else v.imag
    return normalize_vector(part.astype(complex))


def _is_real(vector: np.ndarray, lambdas: tuple[complex, ...]) -> bool:
    return bool(np.all(vector.imag == 0)) and all(v.imag == 0 for v in lambdas)


def _pair_conjugates(tuples: list[EigenTuple], notes: list[str]) -> list[EigenTuple]:
    def key(values: tuple[complex, ...]) -> tuple[tuple[float, float], ...]:
        return tuple((round(v.real, 8) + 0.0, round(v.imag, 8) + 0.0) for v in values)

    groups: dict[tuple[tuple[float, float], ...], list[int]] = {}
    for i, tup in enumerate(tuples):
        if not tup.is_real:
            groups.setdefault(key(tup.lambdas), []).append(i)

    out = list(tuples)
    for k, members in groups.items():
        first_complex = next((re_im for re_im in k if re_im[1] != 0), None)
        if first_complex is None or first_complex[1] < 0:
            continue
        partners = groups.get(tuple((re, -im + 0.0) for re, im in k), [])
        for pos, i in enumerate(members):
            if pos >= len(partners):
                out[i] = replace(out[i], unpaired=True)
                notes.append(f"complex tuple {i} has no conjugate partner")
                continue
            j = partners[pos]
            src = out[i]
            out[j] = replace(
                out[j],
                vector=np.conj(src.vector),
                lambdas=tuple(v.conjugate() for v in src.lambdas),
                rates=tuple(v.conjugate() for v in src.rates),
                chain=tuple(np.conj(v) for v in src.chain),
                chain_matrix=src.chain_matrix,
                conjugate_partner=i,
            )
            out[i] = replace(src, conjugate_partner=j)
    for i, tup in enumerate(out):
        if not tup.is_real and tup.conjugate_partner is None and not tup.unpaired:
            out[i] = replace(tup, unpaired=True)
            notes.append(f"complex tuple {i} has no conjugate partner")
    return out


def common_eigenvectors(
    spec: SystemSpec,
    eigen: Sequence[EigenStructure] | None = None,
    tol: float = 1e-9,
    pivot_overrides: Mapping[complex, int] | None = None,
) -> CommonEigenData:
    """
    Common eigenvectors of the operator family with eigenvalue tuples and chains.

    Candidates are the eigenvectors of the pivot matrix. A pivot eigenspace of
    dimension > 1 is split by restricting each remaining operator to it and
    taking the eigenvectors of the restriction, recursively. Chains are taken
    from the pivot matrix first, then from the other operators, so a common
    eigenvector heading a chain of any family member gets that chain.

    Args:
        spec: Validated system
        eigen: Eigen structure per operator (computed when omitted)
        tol: Relative tolerance
        pivot_overrides: Pivot eigenvalue -> operator whose chains are tried first;
            keys match eigenvalues within 1e-7

    Returns:
        CommonEigenData; for real systems complex tuples come in exact conjugate pairs

    Raises:
        SolvabilityError: If the operators do not commute
        InputError: If an override names a missing operator
    """
    operators = spec.operators
    for j in (pivot_overrides or {}).values():
        if not 0 <= j < len(operators):
            raise InputError(
                f"Operator index {j} out of range for {len(operators)} operators",
                pointer="/pivot_overrides",
            )
    residual, pair = commutator_residual(operators)
    if residual > tol:
        raise SolvabilityError(
            f"Operators do not commute (residual {residual:.3e})",
            verdict={"max_commutator_residual": residual, "offending_pair": pair},
        )
    if eigen is None:
        eigen = [eigen_structure(op, tol) for op in operators]
    eigen = tuple(eigen)
    pivot = select_pivot_matrix(eigen)
    others = [op for j, op in enumerate(operators) if j != pivot]
    notes: list[str] = []
    check_tol = max(tol * 1e3, 1e-7)

    tuples: list[EigenTuple] = []
    for idx, ev in enumerate(eigen[pivot].eigenvalues):
        heads = [chain[0] for chain in eigen[pivot].chains[idx]]
        if not heads:
            continue
        accepted: list[np.ndarray] = []
        for candidate in _split(np.column_stack(heads), others, tol, notes):
            v = normalize_vector(candidate)
            if spec.field is FieldKind.REAL and spec.kind is not SystemKind.RLINEAR:
                v = _realify(v, operators)
            if rank(np.column_stack(accepted + [v]), 1e-8) <= len(accepted):
                continue
            lambdas = tuple(_snap_value(_rayleigh(op, v), 1e-9) for op in operators)
            misfit = max(
                inf_norm((op @ v - lam * v)[:, None]) / (1.0 + inf_norm(op))
                for op, lam in zip(operators, lambdas, strict=True)
            )
            if misfit > check_tol:
                notes.append(f"candidate for eigenvalue {ev.value} is not a common eigenvector")
                continue
            accepted.append(v)
            first = _override_for(pivot_overrides, ev.value)
            head = [pivot] if first is None or first == pivot else [first, pivot]
            order = head + [j for j in range(len(operators)) if j not in head]
            chain, source = _attach_chain(v, lambdas, operators, eigen, order, tol)
            tuples.append(
                EigenTuple(
                    vector=v,
                    lambdas=lambdas,
                    rates=direction_rates(spec, lambdas),
                    is_real=_is_real(v, lambdas),
                    chain=tuple(tidy_vector(c) for c in chain),
                    chain_matrix=source,
                )
            )
            if len(accepted) == len(heads):
                break

    if spec.field is FieldKind.REAL and spec.kind is not SystemKind.RLINEAR:
        tuples = _pair_conjugates(tuples, notes)

    for note in notes:
        logger.warning("spectral_note", note=note)
    logger.info(
        "common_eigenvectors_found",
        pivot=pivot,
        tuples=len(tuples),
        chains=sum(1 for t in tuples if t.degree > 1),
    )
    return CommonEigenData(tuples=tuple(tuples), pivot=pivot, eigen=eigen, notes=tuple(notes))
