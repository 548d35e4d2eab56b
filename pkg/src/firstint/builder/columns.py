"""
Factors with constant Lie derivatives and their exponent combinations.

Every building block of an autonomous integral is a function g whose Lie
derivative along each real independent variable is a constant (its rate):
log|nu x| for real tuples, log P and the phase phi for complex tuples of real
systems, chain functions v and, for real systems, Re v and Im v. A
combination sum c_k g_k with zero rates is a first integral; with
logarithmic members it is emitted as a product of powers times an
exponential.
"""

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np

from firstint.builder.exponents import null_combinations
from firstint.builder.integral import FirstIntegral, TheoremTag, make_integral
from firstint.builder.psi import PsiChain
from firstint.expr.nodes import (
    Abs,
    Atan2,
    Exp,
    Expr,
    Im,
    LinForm,
    Pow,
    Re,
    add,
    lin,
    mul,
    scaled,
)
from firstint.expr.render import render_expr
from firstint.spectral.common import CommonEigenData
from firstint.systems.spec import FieldKind, SystemKind, SystemSpec


class ColumnKind(str, Enum):
    LOG_REAL = "log_real"
    LOG_P = "log_p"
    PHASE = "phase"
    LOG_COMPLEX = "log_complex"
    V = "v"
    V_RE = "v_re"
    V_IM = "v_im"


LOG_KINDS = frozenset({ColumnKind.LOG_REAL, ColumnKind.LOG_P, ColumnKind.LOG_COMPLEX})
CHAIN_KINDS = frozenset({ColumnKind.V, ColumnKind.V_RE, ColumnKind.V_IM})


@dataclass(frozen=True, eq=False)
class Column:
    """
    One factor of the exponent system.

    Attributes:
        kind: Factor kind
        rates: Lie derivative along each real independent variable
        tuple_index: Eigen-tuple the factor comes from
        theta: Position in the chain (0 for eigenvector factors)
        function: g itself (for logarithmic kinds, the base whose log is g)
        label: Provenance label
    """

    kind: ColumnKind
    rates: np.ndarray
    tuple_index: int
    theta: int
    function: Expr
    label: str

    @property
    def is_log(self) -> bool:
        return self.kind in LOG_KINDS

    @property
    def is_chain(self) -> bool:
        return self.kind in CHAIN_KINDS


def complex_mode(spec: SystemSpec) -> bool:
    """Whether exponents are solved over C (R-linear or complex coefficients)."""
    return spec.kind is SystemKind.RLINEAR or spec.field is FieldKind.COMPLEX


def quadratic_form(vector: np.ndarray) -> Expr:
    """P = (Re nu . x)^2 + (Im nu . x)^2 for real x."""
    return add(Pow(lin(vector.real), 2), Pow(lin(vector.imag), 2))


def phase(vector: np.ndarray) -> Expr:
    """phi = atan2(Im nu . x, Re nu . x)."""
    return Atan2(lin(vector.imag), lin(vector.real))


def exponent_columns(
    data: CommonEigenData,
    spec: SystemSpec,
    psi: Mapping[int, PsiChain] | None = None,
) -> list[Column]:
    """
    Columns for every representative tuple and every valid chain function.

    Args:
        data: Common eigen-tuples
        spec: System
        psi: Chain functions by tuple index; only valid chains contribute

    Returns:
        Columns ordered by tuple, eigenvector factors before chain functions
    """
    over_c = complex_mode(spec)
    columns: list[Column] = []
    for i in data.representatives():
        tup = data.tuples[i]
        rates = np.asarray(tup.rates, dtype=complex)
        if over_c:
            columns.append(
                Column(ColumnKind.LOG_COMPLEX, rates, i, 0, lin(tup.vector), f"log(nu{i})")
            )
        elif tup.is_real:
            columns.append(
                Column(ColumnKind.LOG_REAL, rates.real, i, 0, lin(tup.vector.real), f"log|nu{i}|")
            )
        else:
            columns.append(
                Column(
                    ColumnKind.LOG_P, 2 * rates.real, i, 0, quadratic_form(tup.vector), f"P{i}"
                )
            )
            columns.append(
                Column(ColumnKind.PHASE, rates.imag, i, 0, phase(tup.vector), f"phi{i}")
            )
        chain = (psi or {}).get(i)
        if chain is None or not chain.valid:
            continue
        for theta, (v, v_rates) in enumerate(zip(chain.functions, chain.rates, strict=True), 1):
            if over_c:
                columns.append(Column(ColumnKind.V, v_rates, i, theta, v, f"v{i}_{theta}"))
            elif tup.is_real:
                columns.append(Column(ColumnKind.V, v_rates.real, i, theta, v, f"v{i}_{theta}"))
            else:
                columns.append(
                    Column(ColumnKind.V_RE, v_rates.real, i, theta, Re(v), f"re v{i}_{theta}")
                )
                columns.append(
                    Column(ColumnKind.V_IM, v_rates.imag, i, theta, Im(v), f"im v{i}_{theta}")
                )
    return columns


def rate_matrix(columns: Sequence[Column], directions: int) -> np.ndarray:
    """Rates as a (directions, columns) matrix."""
    if not columns:
        return np.zeros((directions, 0), dtype=complex)
    return np.column_stack([np.asarray(c.rates, dtype=complex) for c in columns])


def _power(base: Expr, c: complex, real: bool) -> Expr:
    c = complex(c)
    if c == 1:
        return base
    integral = c.imag == 0 and float(c.real).is_integer()
    if real and not integral:
        return Pow(Abs(base), c)
    return Pow(base, c)


def emit_combination(columns: Sequence[Column], coeffs: np.ndarray, real: bool) -> Expr:
    """
    The function whose logarithm (or value) is sum_k coeffs[k] g_k.

    Without logarithmic members the additive combination is returned; a
    single member with coefficient 1 is the factor itself. Otherwise the
    result is prod base_k^c_k * exp(sum of the remaining terms).
    """
    support = [(col, complex(c)) for col, c in zip(columns, coeffs, strict=True) if c != 0]
    logs = [(col, c) for col, c in support if col.is_log]
    rest = [(col, c.real if real else c) for col, c in support if not col.is_log]
    if not logs:
        return add(*(scaled(c, col.function) for col, c in rest))
    factors: list[Expr] = [
        _power(col.function, c.real if real else c, real and col.kind is ColumnKind.LOG_REAL)
        for col, c in logs
    ]
    if rest:
        factors.append(Exp(add(*(scaled(c, col.function) for col, c in rest))))
    return mul(*factors)


def _complex_objects(support: Sequence[Column]) -> tuple[list[int], list[tuple[int, int]]]:
    # unpaired complex tuples and chain functions: only one of their two columns participates
    kinds: dict[tuple[int, int], set[ColumnKind]] = {}
    for col in support:
        if col.kind in (ColumnKind.LOG_P, ColumnKind.PHASE, ColumnKind.V_RE, ColumnKind.V_IM):
            kinds.setdefault((col.tuple_index, col.theta), set()).add(col.kind)
    tuples = [
        key[0] for key, found in kinds.items() if key[1] == 0 and len(found) == 1
    ]
    functions = [key for key, found in kinds.items() if key[1] > 0 and len(found) == 1]
    return tuples, functions


def classify(spec: SystemSpec, support: Sequence[Column]) -> tuple[TheoremTag, tuple[str, ...]]:
    """
    Construction family of a combination, with classification notes.

    Total systems with chain functions are split into the conjugation-closed
    case, an unpaired complex eigenvector (2A) and an unpaired complex chain
    function (2B); when both kinds are unpaired the 2A form is kept and the
    conflict is reported in a note.
    """
    logs = [c for c in support if c.is_log]
    chains = [c for c in support if c.is_chain]
    complex_parts = any(
        c.kind in (ColumnKind.LOG_P, ColumnKind.PHASE, ColumnKind.V_RE, ColumnKind.V_IM)
        for c in support
    )
    if spec.kind is SystemKind.RLINEAR:
        if chains and not logs:
            return TheoremTag.PSI_DIRECT, ()
        return (TheoremTag.T1_2 if chains else TheoremTag.T1_1), ()

    if spec.kind is SystemKind.TOTAL:
        if chains:
            if not logs:
                return TheoremTag.PSI_DIRECT, ()
            tuples, functions = _complex_objects(support)
            if tuples and functions:
                return TheoremTag.T2_4_CASE2A, (
                    "report: unpaired complex eigenvector and unpaired chain function "
                    f"(tuples {tuples}, functions {functions})",
                )
            if tuples:
                return TheoremTag.T2_4_CASE2A, ()
            if functions:
                return TheoremTag.T2_4_CASE2B, ()
            return TheoremTag.T2_4_CASE1, ()
        if not complex_parts:
            return TheoremTag.T2_1, ()
        complex_tuples = {c.tuple_index for c in support if c.kind is not ColumnKind.LOG_REAL}
        if len(complex_tuples) == 1 and any(c.kind is ColumnKind.LOG_P for c in support):
            return TheoremTag.T2_2, ()
        return TheoremTag.T2_3, ()

    # ordinary systems
    if chains:
        if not logs:
            return TheoremTag.T3_7, ()
        zero_heads = any(
            c.is_log and not np.any(np.asarray(c.rates) != 0)
            for c in logs
            if any(ch.tuple_index == c.tuple_index for ch in chains)
        )
        if any(c.kind in (ColumnKind.V_RE, ColumnKind.V_IM) for c in chains):
            return (TheoremTag.C3_5 if zero_heads else TheoremTag.C3_3), ()
        if zero_heads:
            return (TheoremTag.C3_5 if complex_parts else TheoremTag.C3_4), ()
        return TheoremTag.T3_6, ()
    if len(support) == 1 and support[0].kind is ColumnKind.LOG_REAL:
        return TheoremTag.C3_1, ()
    if not complex_parts:
        if len(logs) == 2 and np.allclose(logs[0].rates, logs[1].rates):
            return TheoremTag.C3_2, ()
        return TheoremTag.T3_2, ()
    if not logs:
        return TheoremTag.T3_5, ()
    complex_tuples = {c.tuple_index for c in support if c.kind is not ColumnKind.LOG_REAL}
    real_tuples = {c.tuple_index for c in support if c.kind is ColumnKind.LOG_REAL}
    if len(complex_tuples) == 1 and not real_tuples:
        return TheoremTag.T3_3, ()
    if real_tuples:
        return TheoremTag.T3_4, ()
    return TheoremTag.T3_5, ()


def integrals_from_columns(
    columns: Sequence[Column],
    spec: SystemSpec,
    tol: float = 1e-9,
    exhaustive: bool = False,
    require_chain: bool | None = None,
) -> list[FirstIntegral]:
    """
    Integrals for the zero-rate combinations of the columns.

    Args:
        columns: Factors with constant rates
        spec: System
        tol: Relative pivot tolerance of the nullspace
        exhaustive: Enumerate minimal column subsets
        require_chain: Keep only combinations with (True) or without (False)
            chain functions; None keeps all

    Returns:
        Integrals deduplicated by rendering, in nullspace order
    """
    real = not complex_mode(spec)
    rates = rate_matrix(columns, spec.directions)
    seen: set[str] = set()
    out: list[FirstIntegral] = []
    for coeffs in null_combinations(rates, real, tol, exhaustive):
        support = [col for col, c in zip(columns, coeffs, strict=True) if c != 0]
        if not support:
            continue
        has_chain = any(col.is_chain for col in support)
        if require_chain is not None and has_chain != require_chain:
            continue
        if (
            len(support) == 1
            and support[0].kind in (ColumnKind.LOG_REAL, ColumnKind.LOG_COMPLEX)
            and isinstance(support[0].function, LinForm)
        ):
            expr: Expr = support[0].function
        else:
            expr = emit_combination(columns, coeffs, real)
        tag, notes = classify(spec, support)
        integral = make_integral(
            expr,
            tag,
            [col.label for col in support],
            spec,
            notes=notes,
        )
        key = render_expr(integral.expr)
        if key in seen:
            continue
        seen.add(key)
        out.append(integral)
    return out
