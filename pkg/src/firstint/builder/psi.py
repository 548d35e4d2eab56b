"""Rational chain functions v_theta of Jordan chains and their constant Lie derivatives."""

from collections.abc import Sequence
from dataclasses import dataclass
from math import comb
from typing import Any

import numpy as np

from firstint.expr.evaluate import evaluate, evaluate_dual
from firstint.expr.hyperplanes import Hyperplane, collect_hyperplanes
from firstint.expr.nodes import Expr, LinForm, add, div, lin, mul, neg, scaled
from firstint.expr.render import render_expr
from firstint.spectral.common import CommonEigenData, direction_rates
from firstint.systems.sampling import safe_points
from firstint.systems.spec import SystemSpec
from firstint.utils.exceptions import InputError
from firstint.utils.helpers import complex_to_json, snap
from firstint.utils.logger import get_logger

logger = get_logger(__name__)

RECONSTRUCTION_TOL = 1e-8
SNAP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class PsiChain:
    """
    Chain functions of one Jordan chain.

    Attributes:
        tuple_index: Eigen-tuple heading the chain
        chain_matrix: Operator the chain belongs to
        forms: Linear forms nu^0 x .. nu^(s-1) x
        functions: v_1 .. v_(s-1)
        mu: Lie derivative of v_theta along each operator, shape (s-1, operators)
        rates: Lie derivative of v_theta along each real independent variable
        mu_constant_violation: Largest deviation of a sampled derivative from its mean
        reconstruction_error: Largest relative defect of the triangular identity
        pivot_ok: L v_1 = 1 and L v_theta = 0 (theta >= 2) along the chain matrix
        valid: All checks passed; invalid chains contribute no integrals
    """

    tuple_index: int
    chain_matrix: int
    forms: tuple[LinForm, ...]
    functions: tuple[Expr, ...]
    mu: np.ndarray
    rates: np.ndarray
    mu_constant_violation: float
    reconstruction_error: float
    pivot_ok: bool
    valid: bool

    @property
    def length(self) -> int:
        return len(self.forms)

    def to_dict(self) -> dict[str, Any]:
        return {
            "tuple_index": self.tuple_index,
            "chain_matrix": self.chain_matrix,
            "functions": [render_expr(v) for v in self.functions],
            "mu": [[complex_to_json(v) for v in row] for row in self.mu],
            "mu_constant_violation": self.mu_constant_violation,
            "reconstruction_error": self.reconstruction_error,
            "pivot_ok": self.pivot_ok,
            "valid": self.valid,
        }


def chain_functions(chain: Sequence[np.ndarray]) -> tuple[tuple[LinForm, ...], tuple[Expr, ...]]:
    """
    Solve nu^theta x = sum_delta C(theta-1, delta-1) v_delta nu^(theta-delta) x for v.

    Forward substitution gives v_1 = nu^1 x / nu^0 x and
    v_theta = (nu^theta x - sum_(delta<theta) C(theta-1, delta-1) v_delta nu^(theta-delta) x)
    / nu^0 x.
    Earlier functions are shared as subtrees.

    Example:
        >>> forms, vs = chain_functions([np.array([1, -1, 1]), np.array([1, 0, -1])])
        >>> render_expr(vs[0])
        'lin([1,0,-1])*pow(lin([1,-1,1]),-1)'
    """
    forms = tuple(lin(v) for v in chain)
    functions: list[Expr] = []
    for theta in range(1, len(forms)):
        terms = [
            scaled(comb(theta - 1, delta - 1), mul(functions[delta - 1], forms[theta - delta]))
            for delta in range(1, theta)
        ]
        numerator = add(forms[theta], *(neg(term) for term in terms)) if terms else forms[theta]
        functions.append(div(numerator, forms[0]))
    return forms, tuple(functions)


def _snap_mu(value: complex) -> complex:
    return snap(complex(value), SNAP_TOL, (1, 2))


def psi_chain(
    chain: Sequence[np.ndarray],
    chain_matrix: int,
    spec: SystemSpec,
    rng: np.random.Generator,
    samples: int = 100,
    mu_tol: float = 1e-7,
    box: float = 2.0,
    margin: float = 1e-3,
    tuple_index: int = 0,
) -> PsiChain:
    """
    Build the chain functions and measure their Lie derivatives.

    Derivatives are taken along the homogeneous generators only. Every
    derivative must be constant; the mean over the sample points is snapped to
    integers or halves within 1e-9.

    Args:
        chain: Chain vectors nu^0 .. nu^(s-1), s >= 2
        chain_matrix: Operator whose chain this is
        spec: System supplying the generators
        rng: Seeded generator for the sample points
        samples: Number of safe sample points
        mu_tol: Allowed deviation from constancy
        box: Sampling box half-width
        margin: Relative distance to keep from excluded sets
        tuple_index: Eigen-tuple index recorded in the result

    Returns:
        PsiChain, flagged invalid when a check fails

    Raises:
        InputError: If the chain has fewer than two vectors
        DomainError: If no safe sample points can be found
    """
    if len(chain) < 2:
        raise InputError(f"Chain of length {len(chain)} has no chain functions")
    forms, functions = chain_functions(chain)
    planes: dict[str, Hyperplane] = {}
    for v in functions:
        for plane in collect_hyperplanes(v, spec.real_state):
            planes.setdefault(plane.render(), plane)
    t, x = safe_points(spec, tuple(planes.values()), samples, rng, box, margin)

    operators = len(spec.matrices)
    mu = np.zeros((len(functions), operators), dtype=complex)
    violation = 0.0
    zero_t = np.zeros_like(t)
    for theta, v in enumerate(functions):
        for k, matrix in enumerate(spec.matrices):
            _, deriv = evaluate_dual(v, t, x, zero_t, x @ matrix.T)
            mean = _snap_mu(complex(np.mean(deriv)))
            mu[theta, k] = mean
            violation = max(violation, float(np.max(np.abs(deriv - mean))) / (1.0 + abs(mean)))

    pivot_ok = abs(mu[0, chain_matrix] - 1.0) <= mu_tol and bool(
        np.all(np.abs(mu[1:, chain_matrix]) <= mu_tol)
    )

    linear = [evaluate(f, t, x) for f in forms]
    values = [evaluate(v, t, x) for v in functions]
    error = 0.0
    for theta in range(1, len(forms)):
        rebuilt = sum(
            comb(theta - 1, delta - 1) * values[delta - 1] * linear[theta - delta]
            for delta in range(1, theta + 1)
        )
        error = max(
            error, float(np.max(np.abs(linear[theta] - rebuilt) / (1.0 + np.abs(linear[theta]))))
        )

    rates = np.array([direction_rates(spec, tuple(row)) for row in mu], dtype=complex)
    valid = violation <= mu_tol and pivot_ok and error <= RECONSTRUCTION_TOL
    if violation > mu_tol:
        logger.warning("chain_mu_violation", tuple_index=tuple_index, violation=violation)
    if not pivot_ok:
        logger.warning("chain_pivot_check_failed", tuple_index=tuple_index)
    logger.debug(
        "psi_chain_built",
        tuple_index=tuple_index,
        length=len(forms),
        valid=valid,
        reconstruction_error=error,
    )
    return PsiChain(
        tuple_index=tuple_index,
        chain_matrix=chain_matrix,
        forms=forms,
        functions=functions,
        mu=mu,
        rates=rates,
        mu_constant_violation=violation,
        reconstruction_error=error,
        pivot_ok=pivot_ok,
        valid=valid,
    )


def build_psi_chains(
    data: CommonEigenData,
    spec: SystemSpec,
    rng: np.random.Generator,
    samples: int = 100,
    mu_tol: float = 1e-7,
    box: float = 2.0,
    margin: float = 1e-3,
) -> dict[int, PsiChain]:
    """Chain functions for every representative tuple heading a chain of length >= 2."""
    chains: dict[int, PsiChain] = {}
    for i in data.representatives():
        tup = data.tuples[i]
        if tup.degree < 2:
            continue
        chains[i] = psi_chain(
            tup.chain, tup.chain_matrix, spec, rng, samples, mu_tol, box, margin, tuple_index=i
        )
    logger.info(
        "psi_chains_built",
        chains=len(chains),
        valid=sum(1 for c in chains.values() if c.valid),
    )
    return chains
