"""Quadrature accumulators: closed 1-forms in t integrated from an anchor."""

from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from firstint.expr.evaluate import evaluate
from firstint.expr.nodes import Expr
from firstint.expr.render import render_expr

GAUSS_NODES = 32


@dataclass(frozen=True)
class QuadratureSpec:
    """
    An accumulator Q with dQ = sum_j g_j(t) dt_j and Q(anchor) = 0.

    Attributes:
        name: Name referenced by Quadrature nodes
        integrands: One time-only expression g_j per independent variable
        anchor: Base point of the integration
    """

    name: str
    integrands: tuple[Expr, ...]
    anchor: tuple[float, ...]

    def rates(self, t: np.ndarray) -> np.ndarray:
        """Integrand values g_j(t), shape (N, m)."""
        t = np.atleast_2d(np.asarray(t, dtype=float))
        empty = np.zeros((t.shape[0], 0), dtype=complex)
        return np.column_stack([evaluate(g, t, empty) for g in self.integrands])

    def values(self, t: np.ndarray) -> np.ndarray:
        """
        Q(t) by Gauss-Legendre quadrature along the straight segment from the anchor.

        Args:
            t: Times, shape (N, m)

        Returns:
            Accumulator values, shape (N,)
        """
        t = np.atleast_2d(np.asarray(t, dtype=float))
        anchor = np.asarray(self.anchor, dtype=float)
        nodes, weights = np.polynomial.legendre.leggauss(GAUSS_NODES)
        s = 0.5 * (nodes + 1.0)
        delta = t - anchor
        total = np.zeros(t.shape[0], dtype=complex)
        for node, weight in zip(s, weights, strict=True):
            g = self.rates(anchor + node * delta)
            total += 0.5 * weight * np.sum(g * delta, axis=1)
        return total

    def to_dict(self) -> dict[str, object]:
        return {
            "name": self.name,
            "integrands": [render_expr(g) for g in self.integrands],
            "anchor": list(self.anchor),
        }


def quadrature_env(
    specs: Iterable[QuadratureSpec], t: np.ndarray
) -> tuple[dict[str, np.ndarray], dict[str, np.ndarray]]:
    """Values and t-gradients of all accumulators at a batch of times."""
    values: dict[str, np.ndarray] = {}
    rates: dict[str, np.ndarray] = {}
    for spec in specs:
        values[spec.name] = spec.values(t)
        rates[spec.name] = spec.rates(t)
    return values, rates

