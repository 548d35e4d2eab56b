"""Lie derivatives of expressions along the directional generators of a system."""

from collections.abc import Mapping
from typing import TYPE_CHECKING

import numpy as np

from firstint.expr.evaluate import Point, evaluate_dual
from firstint.expr.nodes import Expr

if TYPE_CHECKING:
    from firstint.systems.spec import SystemSpec


def lie_batch(
    e: Expr,
    spec: "SystemSpec",
    j: int,
    t: np.ndarray,
    x: np.ndarray,
    quad: Mapping[str, np.ndarray] | None = None,
    quad_rates: Mapping[str, np.ndarray] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Values and Lie derivatives along real direction j on a batch of points.

    The tangent is (unit t_j, M_j x + f_j(t)); for R-linear systems M_j is
    the combined generator along Re z_j or Im z_j.

    Returns:
        (values, derivatives), both of shape (N,)
    """
    t = np.atleast_2d(np.asarray(t, dtype=float))
    x = np.atleast_2d(np.asarray(x, dtype=complex))
    if t.shape[0] == 1 and x.shape[0] > 1:
        t = np.repeat(t, x.shape[0], axis=0)
    dt = np.zeros_like(t)
    dt[:, j] = 1.0
    dx = spec.vector_field(j, t, x)
    return evaluate_dual(e, t, x, dt, dx, quad, quad_rates)


def lie_derivative(
    e: Expr,
    spec: "SystemSpec",
    j: int,
    p: Point,
    quad_env: Mapping[str, complex] | None = None,
    quad_rates: Mapping[str, np.ndarray] | None = None,
) -> complex:
    """
    Lie derivative of an expression along direction j at a point.

    Args:
        e: Expression
        spec: System supplying the generators
        j: Index of the real independent variable
        p: Evaluation point
        quad_env: Quadrature values by name
        quad_rates: Quadrature integrand values by name, each of length m

    Returns:
        d/dt_j e + (M_j x + f_j(t)) . grad_x e

    Raises:
        DomainError: If p lies on an excluded set of e
    """
    quad = {k: np.array([v], dtype=complex) for k, v in (quad_env or {}).items()}
    rates = {k: np.asarray(v, dtype=complex)[None, :] for k, v in (quad_rates or {}).items()}
    _, deriv = lie_batch(e, spec, j, p.t[None, :], p.x[None, :], quad, rates)
    return complex(deriv[0])
