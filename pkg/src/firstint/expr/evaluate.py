"""Vectorised evaluation with forward-mode dual numbers.

All evaluation works on batches: ``t`` has shape (N, m) and ``x`` shape
(N, d). A single-point API is layered on top.
"""

from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from firstint.expr.nodes import (
    Abs,
    Atan2,
    Const,
    Exp,
    Expr,
    Im,
    LinForm,
    Log,
    Pow,
    Prod,
    Quadrature,
    Re,
    Sum,
    Var,
)
from firstint.expr.render import render_expr
from firstint.utils.exceptions import DomainError, InputError

# magnitude below which a divisor, log argument or atan2 pair counts as zero
ZERO_TOL = 1e-12


@dataclass(frozen=True)
class Point:
    """A single evaluation point: times t (length m) and state x (length d)."""

    t: np.ndarray
    x: np.ndarray

    @classmethod
    def of(cls, t: object, x: object) -> "Point":
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        x_arr = np.atleast_1d(np.asarray(x, dtype=complex))
        if not (np.all(np.isfinite(t_arr)) and np.all(np.isfinite(x_arr))):
            raise InputError("Point has non-finite coordinates")
        return cls(t_arr, x_arr)


@dataclass
class Dual:
    """Batch of values with directional derivatives."""

    value: np.ndarray
    deriv: np.ndarray

    def __add__(self, other: "Dual") -> "Dual":
        return Dual(self.value + other.value, self.deriv + other.deriv)

    def __mul__(self, other: "Dual") -> "Dual":
        return Dual(self.value * other.value, self.deriv * other.value + self.value * other.deriv)


class _Evaluator:
    def __init__(
        self,
        t: np.ndarray,
        x: np.ndarray,
        dt: np.ndarray,
        dx: np.ndarray,
        quad: Mapping[str, np.ndarray] | None,
        quad_rates: Mapping[str, np.ndarray] | None,
    ) -> None:
        self.t = t
        self.x = x
        self.dt = dt
        self.dx = dx
        self.quad = quad or {}
        self.quad_rates = quad_rates or {}
        self.size = t.shape[0]
        self.memo: dict[int, Dual] = {}

    def zeros(self) -> np.ndarray:
        return np.zeros(self.size, dtype=complex)

    def run(self, e: Expr) -> Dual:
        key = id(e)
        if key not in self.memo:
            self.memo[key] = self.node(e)
        return self.memo[key]

    def node(self, e: Expr) -> Dual:
        match e:
            case Const(value):
                return Dual(np.full(self.size, complex(value)), self.zeros())
            case Var("t", index):
                return Dual(self.t[:, index].astype(complex), self.dt[:, index].astype(complex))
            case Var(_, index):
                return Dual(self.x[:, index].astype(complex), self.dx[:, index].astype(complex))
            case LinForm(coeffs):
                nu = np.array(coeffs, dtype=complex)
                if nu.shape[0] != self.x.shape[1]:
                    raise InputError(
                        f"Linear form of length {nu.shape[0]} on a state of dimension "
                        f"{self.x.shape[1]}"
                    )
                return Dual(self.x @ nu, self.dx @ nu)
            case Re(arg):
                a = self.run(arg)
                return Dual(a.value.real.astype(complex), a.deriv.real.astype(complex))
            case Im(arg):
                a = self.run(arg)
                return Dual(a.value.imag.astype(complex), a.deriv.imag.astype(complex))
            case Sum(terms):
                out = self.run(terms[0])
                for term in terms[1:]:
                    out = out + self.run(term)
                return out
            case Prod(factors):
                out = self.run(factors[0])
                for factor in factors[1:]:
                    out = out * self.run(factor)
                return out
            case Pow(base, exponent):
                return self.power(e, self.run(base), complex(exponent))
            case Exp(arg):
                a = self.run(arg)
                value = np.exp(a.value)
                return Dual(value, value * a.deriv)
            case Log(arg):
                a = self.run(arg)
                self.guard(np.abs(a.value) <= ZERO_TOL, arg)
                return Dual(np.log(a.value), a.deriv / a.value)
            case Abs(arg):
                a = self.run(arg)
                mag = np.abs(a.value)
                kink = (mag <= ZERO_TOL) & (np.abs(a.deriv) > 0)
                self.guard(kink, arg)
                safe = np.where(mag > 0, mag, 1.0)
                deriv = np.where(mag > 0, (np.conj(a.value) * a.deriv).real / safe, 0.0)
                return Dual(mag.astype(complex), deriv.astype(complex))
            case Atan2(num, den):
                y, x = self.run(num), self.run(den)
                yr, xr = y.value.real, x.value.real
                r2 = yr * yr + xr * xr
                self.guard(r2 <= ZERO_TOL * ZERO_TOL, den)
                deriv = (xr * y.deriv.real - yr * x.deriv.real) / r2
                return Dual(np.arctan2(yr, xr).astype(complex), deriv.astype(complex))
            case Quadrature(name):
                if name not in self.quad:
                    raise InputError(f"No value bound for quadrature {name!r}")
                value = np.broadcast_to(np.asarray(self.quad[name], dtype=complex), (self.size,))
                rates = self.quad_rates.get(name)
                deriv = self.zeros() if rates is None else np.sum(rates * self.dt, axis=1)
                return Dual(value.copy(), deriv.astype(complex))
        raise TypeError(f"Unknown expression node {type(e).__name__}")

    def power(self, e: Expr, a: Dual, h: complex) -> Dual:
        assert isinstance(e, Pow)
        if h == 0:
            return Dual(np.ones(self.size, dtype=complex), self.zeros())
        if e.integral_exponent:
            k = int(h.real)
            if k < 0:
                self.guard(np.abs(a.value) <= ZERO_TOL, e.base)
            value = a.value**k
            deriv = k * a.value ** (k - 1) * a.deriv if k != 1 else a.deriv
            return Dual(value, deriv)
        self.guard(np.abs(a.value) <= ZERO_TOL, e.base)
        negative_real = (a.value.imag == 0) & (a.value.real < 0)
        value = np.where(negative_real, np.abs(a.value) ** h, a.value**h)
        return Dual(value, h * value * a.deriv / a.value)

    def guard(self, mask: np.ndarray, arg: Expr) -> None:
        if np.any(mask):
            form = render_expr(arg)
            raise DomainError(f"Evaluation on the excluded set of {form}", hyperplane=form)


def _batch(t: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    t = np.atleast_2d(np.asarray(t, dtype=float))
    x = np.atleast_2d(np.asarray(x, dtype=complex))
    if t.shape[0] == 1 and x.shape[0] > 1:
        t = np.broadcast_to(t, (x.shape[0], t.shape[1]))
    return t, x


def evaluate(
    e: Expr,
    t: np.ndarray,
    x: np.ndarray,
    quad: Mapping[str, np.ndarray] | None = None,
) -> np.ndarray:
    """
    Evaluate an expression on a batch of points.

    Args:
        e: Expression
        t: Times, shape (N, m)
        x: States, shape (N, d)
        quad: Quadrature values by name, each of shape (N,)

    Returns:
        Complex values of shape (N,)

    Raises:
        DomainError: If a point lies on an excluded set of the expression
    """
    t, x = _batch(t, x)
    return _Evaluator(t, x, np.zeros_like(t), np.zeros_like(x), quad, None).run(e).value


def evaluate_dual(
    e: Expr,
    t: np.ndarray,
    x: np.ndarray,
    dt: np.ndarray,
    dx: np.ndarray,
    quad: Mapping[str, np.ndarray] | None = None,
    quad_rates: Mapping[str, np.ndarray] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Values and directional derivatives on a batch of points.

    Args:
        e: Expression
        t: Times, shape (N, m)
        x: States, shape (N, d)
        dt: Time components of the direction, shape (N, m) or (m,)
        dx: State components of the direction, shape (N, d) or (d,)
        quad: Quadrature values by name, each of shape (N,)
        quad_rates: Quadrature gradients in t by name, each of shape (N, m)

    Returns:
        (values, derivatives), both of shape (N,)
    """
    t, x = _batch(t, x)
    dt = np.broadcast_to(np.asarray(dt, dtype=float), t.shape)
    dx = np.broadcast_to(np.asarray(dx, dtype=complex), x.shape)
    out = _Evaluator(t, x, dt, dx, quad, quad_rates).run(e)
    return out.value, out.deriv


def eval_expr(e: Expr, p: Point, quad_env: Mapping[str, complex] | None = None) -> complex:
    """
    Evaluate an expression at a single point.

    Example:
        >>> eval_expr(LinForm((1, -1, 1, -1)), Point.of([0.0], [4, 1, 2, 0]))
        (5+0j)
    """
    quad = {k: np.array([v], dtype=complex) for k, v in (quad_env or {}).items()}
    return complex(evaluate(e, p.t[None, :], p.x[None, :], quad)[0])


def eval_dual(
    e: Expr,
    p: Point,
    direction: np.ndarray,
    quad_env: Mapping[str, complex] | None = None,
    quad_rates: Mapping[str, np.ndarray] | None = None,
) -> tuple[complex, complex]:
    """
    Value and derivative of an expression along a tangent vector in (t, x).

    Args:
        e: Expression
        p: Evaluation point
        direction: Concatenated (dt, dx) of length m + d
        quad_env: Quadrature values by name
        quad_rates: Quadrature gradients in t by name, each of length m

    Returns:
        (value, derivative)
    """
    direction = np.asarray(direction, dtype=complex)
    m = p.t.shape[0]
    if direction.shape[0] != m + p.x.shape[0]:
        raise InputError(f"Direction has length {direction.shape[0]}, expected {m + p.x.shape[0]}")
    quad = {k: np.array([v], dtype=complex) for k, v in (quad_env or {}).items()}
    rates = {k: np.asarray(v, dtype=complex)[None, :] for k, v in (quad_rates or {}).items()}
    value, deriv = evaluate_dual(
        e, p.t[None, :], p.x[None, :], direction[:m].real, direction[m:], quad, rates
    )
    return complex(value[0]), complex(deriv[0])
