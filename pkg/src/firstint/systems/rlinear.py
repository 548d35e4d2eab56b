"""Embedding of R-linear complex systems into 2n-dimensional linear systems."""

from collections.abc import Mapping, Sequence
from typing import Any

import numpy as np

from firstint.expr.parser import parse_expr
from firstint.systems.spec import FieldKind, SystemKind, SystemSpec
from firstint.utils.exceptions import InputError
from firstint.utils.validators import validate_finite


def _entry(value: Any, pointer: str) -> complex:
    try:
        if isinstance(value, (list, tuple)):
            real, imag = value
            return complex(float(real), float(imag))
        return complex(value)
    except (TypeError, ValueError) as e:
        raise InputError(f"Not a number: {value!r}", pointer=pointer) from e


def _conj_swap(row: np.ndarray, n: int) -> np.ndarray:
    """Coefficients of conj(sum_rho a_rho gamma_rho) in terms of gamma."""
    conj = np.conj(row)
    return np.concatenate([conj[n:], conj[:n]])


def embed_rlinear(
    raw: Mapping[str, Any],
    tol: float | None = None,
    references: Sequence[str] = (),
    name: str | None = None,
) -> SystemSpec:
    """
    Build the 2m field matrices of an R-linear system on gamma = (w, conj(w)).

    The system is dw_tau = sum_k (sum_rho a[tau][k][rho] gamma_rho) dzeta_k with
    dzeta = (dz_1..dz_m, dz̄_1..dz̄_m). The equations for conj(w) follow by
    conjugation, so the matrix along dz_k has rows a[tau][k] followed by the
    conjugated, half-swapped rows a[tau][m+k], and symmetrically for dz̄_k.
    Transposes of these matrices are the operator matrices acting on linear
    forms in gamma.

    Args:
        raw: Mapping with "n", "m" and "coefficients" (shape n x 2m x 2n)
        tol: Tolerance override carried on the spec
        references: Known first integrals as expression strings
        name: Label used in reports

    Returns:
        SystemSpec of kind rlinear with complex field

    Raises:
        InputError: If the tensor shape does not match n and m
    """
    n, m = int(raw["n"]), int(raw["m"])
    coefficients = raw["coefficients"]
    if len(coefficients) != n:
        raise InputError(
            f"Expected {n} equations, got {len(coefficients)}", pointer="/rlinear_coeffs"
        )
    a = np.zeros((n, 2 * m, 2 * n), dtype=complex)
    for tau, per_k in enumerate(coefficients):
        if len(per_k) != 2 * m:
            raise InputError(
                f"Expected {2 * m} differentials, got {len(per_k)}",
                pointer=f"/rlinear_coeffs/{tau}",
            )
        for k, row in enumerate(per_k):
            pointer = f"/rlinear_coeffs/{tau}/{k}"
            if len(row) != 2 * n:
                raise InputError(f"Expected {2 * n} coefficients, got {len(row)}", pointer=pointer)
            a[tau, k] = [_entry(v, f"{pointer}/{rho}") for rho, v in enumerate(row)]
    validate_finite(a, "/rlinear_coeffs")

    matrices = []
    for k in range(2 * m):
        partner = (k + m) % (2 * m)
        top = a[:, k, :]
        bottom = np.array([_conj_swap(a[tau, partner], n) for tau in range(n)]).reshape(n, 2 * n)
        matrices.append(np.vstack([top, bottom]))

    return SystemSpec(
        kind=SystemKind.RLINEAR,
        n=n,
        m=m,
        matrices=tuple(matrices),
        field=FieldKind.COMPLEX,
        tol=tol,
        references=tuple(parse_expr(text, f"/reference/{i}") for i, text in enumerate(references)),
        name=name,
        reference_text=tuple(references),
    )


def conjugation_defect(states: np.ndarray, n: int) -> float:
    """Max |gamma_{n+i} - conj(gamma_i)| over a batch of embedded states."""
    states = np.atleast_2d(states)
    return float(np.max(np.abs(states[:, n:] - np.conj(states[:, :n])), initial=0.0))


def embed_state(w: np.ndarray) -> np.ndarray:
    """gamma = (w, conj(w)) for a batch of complex states w, shape (N, n)."""
    w = np.atleast_2d(np.asarray(w, dtype=complex))
    return np.hstack([w, np.conj(w)])
