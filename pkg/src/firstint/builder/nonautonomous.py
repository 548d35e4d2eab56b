"""Time-dependent integrals: eigenvector forms and chain functions against linear time."""

from collections.abc import Mapping

import numpy as np

from firstint.builder.columns import complex_mode, phase, quadratic_form
from firstint.builder.integral import FirstIntegral, TheoremTag, make_integral
from firstint.builder.psi import PsiChain
from firstint.expr.nodes import Exp, Expr, Im, Re, add, lin, linear_time, mul, neg
from firstint.spectral.common import CommonEigenData
from firstint.systems.spec import SystemKind, SystemSpec
from firstint.utils.logger import get_logger

logger = get_logger(__name__)


def _tags(spec: SystemSpec) -> tuple[TheoremTag, TheoremTag, TheoremTag, TheoremTag]:
    # (real tuple, complex tuple, real chain, complex chain)
    match spec.kind:
        case SystemKind.RLINEAR:
            return TheoremTag.T1_3, TheoremTag.T1_3, TheoremTag.T1_4, TheoremTag.T1_4
        case SystemKind.TOTAL:
            return TheoremTag.T2_5, TheoremTag.C2_2, TheoremTag.T2_6, TheoremTag.C2_3
        case _:
            return TheoremTag.T3_8, TheoremTag.C3_6, TheoremTag.T3_9, TheoremTag.T3_9


def _damped(form: Expr, rates: np.ndarray) -> Expr:
    if not np.any(rates != 0):
        return form
    return mul(form, Exp(neg(linear_time(tuple(rates)))))


def _shifted(g: Expr, rates: np.ndarray) -> Expr:
    return add(g, neg(linear_time(tuple(rates))))


def build_nonautonomous_integrals(
    data: CommonEigenData,
    psi: Mapping[int, PsiChain],
    spec: SystemSpec,
) -> list[FirstIntegral]:
    """
    Integrals that depend on the independent variables.

    Per representative tuple: (nu x) exp(-sigma . t) for real tuples and
    complex-valued systems; P exp(-2 Re(sigma) . t) and phi - Im(sigma) . t
    for complex tuples of real systems. Per chain function of a valid chain:
    v - rate . t (its real and imaginary parts for complex chains of real
    systems). Chain functions with zero rates are already autonomous and are
    skipped.

    Args:
        data: Common eigen-tuples
        psi: Chain functions by tuple index
        spec: System

    Returns:
        Time-dependent integrals (a zero-rate tuple yields its linear form)
    """
    real_tag, complex_tag, chain_tag, complex_chain_tag = _tags(spec)
    over_c = complex_mode(spec)
    out: list[FirstIntegral] = []
    for i in data.representatives():
        tup = data.tuples[i]
        rates = np.asarray(tup.rates, dtype=complex)
        label = f"nu{i}"
        if over_c:
            out.append(make_integral(_damped(lin(tup.vector), rates), real_tag, [label], spec))
        elif tup.is_real:
            out.append(
                make_integral(_damped(lin(tup.vector.real), rates.real), real_tag, [label], spec)
            )
        else:
            out.append(
                make_integral(
                    _damped(quadratic_form(tup.vector), 2 * rates.real),
                    complex_tag,
                    [f"P{i}"],
                    spec,
                )
            )
            out.append(
                make_integral(
                    _shifted(phase(tup.vector), rates.imag), complex_tag, [f"phi{i}"], spec
                )
            )

        chain = psi.get(i)
        if chain is None or not chain.valid:
            continue
        for theta, (v, v_rates) in enumerate(zip(chain.functions, chain.rates, strict=True), 1):
            if not np.any(np.abs(v_rates) > 0):
                continue
            label = f"v{i}_{theta}"
            if over_c or tup.is_real:
                shift = v_rates if over_c else v_rates.real
                out.append(make_integral(_shifted(v, shift), chain_tag, [label], spec))
                continue
            out.append(
                make_integral(
                    _shifted(Re(v), v_rates.real), complex_chain_tag, [f"re {label}"], spec
                )
            )
            out.append(
                make_integral(
                    _shifted(Im(v), v_rates.imag), complex_chain_tag, [f"im {label}"], spec
                )
            )
    logger.info("nonautonomous_integrals_built", count=len(out))
    return out
