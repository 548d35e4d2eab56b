"""Integrals of forced systems: damped chain forms minus quadrature accumulators."""

from collections.abc import Sequence

import numpy as np

from firstint.builder.integral import FirstIntegral, TheoremTag, make_integral
from firstint.expr.nodes import (
    Const,
    Exp,
    Expr,
    Im,
    Pow,
    Quadrature,
    Re,
    add,
    lin,
    linear_time,
    mul,
    neg,
    scaled,
    t_var,
)
from firstint.expr.quadrature import QuadratureSpec
from firstint.linalg.elimination import inf_norm
from firstint.spectral.common import CommonEigenData, EigenTuple
from firstint.systems.spec import RLINEAR_FORCING_UNSUPPORTED, SystemKind, SystemSpec
from firstint.utils.exceptions import InputError
from firstint.utils.helpers import snap
from firstint.utils.logger import get_logger

logger = get_logger(__name__)

Monomial = tuple[int, ...]
PolyMatrix = dict[Monomial, np.ndarray]

INVARIANCE_TOL = 1e-8


def _poly_mul(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    out: PolyMatrix = {}
    for ea, ma in a.items():
        for eb, mb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb, strict=True))
            out[e] = out.get(e, 0) + ma @ mb
    return out


def exp_nilpotent(nilpotents: Sequence[np.ndarray], size: int) -> PolyMatrix:
    """
    exp(-sum_j N_j t_j) for commuting nilpotent N_j as a polynomial in t.

    Returns:
        Monomial exponent tuple -> coefficient matrix
    """
    m = len(nilpotents)
    zero: Monomial = (0,) * m
    term: PolyMatrix = {zero: np.eye(size, dtype=complex)}
    total: PolyMatrix = dict(term)
    generator: PolyMatrix = {
        tuple(int(i == j) for i in range(m)): -np.asarray(n, dtype=complex)
        for j, n in enumerate(nilpotents)
    }
    for p in range(1, size):
        term = {e: c / p for e, c in _poly_mul(term, generator).items()}
        for e, c in term.items():
            total[e] = total.get(e, 0) + c
    return {e: c for e, c in total.items() if np.any(np.abs(c) > 1e-14)}


def _monomial(e: Monomial) -> Expr:
    factors: list[Expr] = [
        t_var(j) if k == 1 else Pow(t_var(j), k) for j, k in enumerate(e) if k > 0
    ]
    return mul(*factors) if factors else Const(1 + 0j)


def _entry(poly: PolyMatrix, k: int, i: int) -> Expr | None:
    terms = [
        scaled(snap(complex(c[k, i]), 1e-10, (1, 2)), _monomial(e))
        for e, c in sorted(poly.items())
        if abs(c[k, i]) > 1e-12
    ]
    return add(*terms) if terms else None


def restriction(
    vectors: np.ndarray, operators: Sequence[np.ndarray]
) -> tuple[list[np.ndarray], float]:
    """
    Matrices S^j with B_j V = V S^j^T for the columns V, and the invariance defect.

    Returns:
        (S^j per operator, largest relative residual of the least-squares fit)
    """
    s_list = []
    defect = 0.0
    for op in operators:
        image = op @ vectors
        coeffs = np.linalg.lstsq(vectors, image, rcond=None)[0]
        defect = max(defect, inf_norm(vectors @ coeffs - image) / (1.0 + inf_norm(image)))
        s_list.append(coeffs.T)
    return s_list, defect


def _tag(spec: SystemSpec, tup: EigenTuple, chained: bool) -> TheoremTag:
    if spec.kind is SystemKind.TOTAL:
        if chained:
            return TheoremTag.T2_8
        return TheoremTag.T2_7 if tup.is_real else TheoremTag.C2_4
    if tup.is_real:
        return TheoremTag.T3_11 if chained else TheoremTag.T3_10
    return TheoremTag.T3_12 if chained else TheoremTag.C3_7


def _forcing_form(spec: SystemSpec, j: int, column: np.ndarray) -> Expr:
    # nu . f_j(t)
    if spec.forcing is None:
        return Const(0j)
    terms = [scaled(c, f) for c, f in zip(column, spec.forcing[j], strict=True) if c != 0]
    return add(*terms) if terms else Const(0j)


def build_nonhomogeneous_integrals(
    data: CommonEigenData,
    spec: SystemSpec,
    anchor: Sequence[float] | None = None,
) -> list[FirstIntegral]:
    """
    Integrals of dx = sum_j (M_j x + f_j(t)) dt_j from common eigenvectors and chains.

    For a representative tuple with chain vectors V, y = V^T x obeys
    dy = sum_j (S^j y + V^T f_j) dt_j where S^j is the restriction of the
    operator B_j to span V. With Phi(t) = exp(-sum_j S^j t_j), every
    component of Phi(t) y - Q(t) is a first integral, Q accumulating
    Phi(t) V^T f_j(t) from the anchor. Phi is exp(-lambda . t) times a
    polynomial in t. When span V is not invariant under every operator only
    the eigenvector is used.

    Complex tuples of real systems give the real and imaginary parts of each
    component and |F_0|^2.

    Args:
        data: Common eigen-tuples
        spec: Forced ordinary or total system
        anchor: Base point of the accumulators (zeros by default)

    Returns:
        Integrals carrying their quadrature accumulators

    Raises:
        InputError: For R-linear systems
    """
    if spec.kind is SystemKind.RLINEAR:
        raise InputError(RLINEAR_FORCING_UNSUPPORTED, pointer="/forcing")
    base = tuple(float(a) for a in (anchor if anchor is not None else [0.0] * spec.m))
    if len(base) != spec.m:
        raise InputError(f"Anchor has length {len(base)}, expected {spec.m}", pointer="/anchor")

    out: list[FirstIntegral] = []
    for i in data.representatives():
        tup = data.tuples[i]
        vectors = np.column_stack(tup.chain or (tup.vector,))
        notes: tuple[str, ...] = ()
        s_list, defect = restriction(vectors, spec.operators)
        if vectors.shape[1] > 1 and defect > INVARIANCE_TOL:
            notes = (f"chain span of tuple {i} is not invariant (defect {defect:.2e}); head only",)
            logger.warning("forced_chain_not_invariant", tuple_index=i, defect=defect)
            vectors = vectors[:, :1]
            s_list, _ = restriction(vectors, spec.operators)
        size = vectors.shape[1]
        lambdas = np.asarray(tup.lambdas, dtype=complex)
        nilpotents = [s - lam * np.eye(size) for s, lam in zip(s_list, lambdas, strict=True)]
        poly = exp_nilpotent(nilpotents, size)
        damping: Expr | None = (
            Exp(neg(linear_time(tuple(lambdas)))) if np.any(lambdas != 0) else None
        )

        components: list[tuple[Expr, QuadratureSpec]] = []
        for k in range(size):
            state_terms: list[Expr] = []
            integrands: list[Expr] = []
            for j in range(spec.m):
                forced_terms = []
                for idx in range(size):
                    entry = _entry(poly, k, idx)
                    if entry is None:
                        continue
                    if j == 0:
                        state_terms.append(mul(entry, lin(vectors[:, idx])))
                    forced_terms.append(mul(entry, _forcing_form(spec, j, vectors[:, idx])))
                g = add(*forced_terms) if forced_terms else Const(0j)
                integrands.append(mul(damping, g) if damping is not None else g)
            state = add(*state_terms)
            if damping is not None:
                state = mul(damping, state)
            name = f"q{i}_{k}"
            quad = QuadratureSpec(name, tuple(integrands), base)
            components.append((add(state, neg(Quadrature(name))), quad))

        chained = size > 1
        tag = _tag(spec, tup, chained)
        provenance = [f"nu{i}"] + [f"nu{i}^{k}" for k in range(1, size)]
        quads = [q for _, q in components]
        if tup.is_real:
            for k, (expr, quad) in enumerate(components):
                out.append(
                    make_integral(expr, tag, provenance[: k + 1], spec, [quad], notes=notes)
                )
            continue
        for k, (expr, _) in enumerate(components):
            used = quads[k : k + 1]
            out.append(make_integral(Re(expr), tag, provenance[: k + 1], spec, used, notes))
            out.append(make_integral(Im(expr), tag, provenance[: k + 1], spec, used, notes))
        head = components[0][0]
        out.append(
            make_integral(
                add(Pow(Re(head), 2), Pow(Im(head), 2)),
                tag,
                provenance[:1],
                spec,
                quads[:1],
                notes,
            )
        )
    logger.info("nonhomogeneous_integrals_built", count=len(out))
    return out
