"""Excluded sets of expressions: registration, safe sampling and crossing events."""

from collections.abc import Mapping
from dataclasses import dataclass
from enum import Enum

import numpy as np

from firstint.expr.evaluate import evaluate
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
    walk,
)
from firstint.expr.render import render_expr

EVENT_TOL = 1e-9


class HyperplaneKind(str, Enum):
    """How an excluded set constrains a form."""

    REAL = "real"  # a real form keeps its sign
    BRANCH = "branch"  # a complex form stays off the closed negative real axis
    POINT = "point"  # a complex form stays away from 0


@dataclass(frozen=True)
class Hyperplane:
    """An excluded set {form = 0} (or a branch cut of form) of an expression."""

    kind: HyperplaneKind
    expr: Expr
    scale: float = 1.0

    def render(self) -> str:
        return render_expr(self.expr)

    def values(
        self, t: np.ndarray, x: np.ndarray, quad: Mapping[str, np.ndarray] | None = None
    ) -> np.ndarray:
        return evaluate(self.expr, t, x, quad)

    def safe(self, values: np.ndarray, margin: float) -> np.ndarray:
        """Mask of values at distance more than margin * scale from the excluded set."""
        limit = margin * self.scale
        match self.kind:
            case HyperplaneKind.REAL:
                return np.abs(values.real) > limit
            case HyperplaneKind.BRANCH:
                return (np.abs(values.imag) > limit) | (values.real > limit)
        return np.abs(values) > limit

    def crossed(self, before: np.ndarray, after: np.ndarray) -> np.ndarray:
        """Mask of steps whose endpoints lie on different components."""
        limit = EVENT_TOL * self.scale
        match self.kind:
            case HyperplaneKind.REAL:
                return (np.sign(before.real) != np.sign(after.real)) | (np.abs(after.real) <= limit)
            case HyperplaneKind.BRANCH:
                flips = np.sign(before.imag) != np.sign(after.imag)
                gap = before.imag - after.imag
                weight = np.divide(before.imag, gap, out=np.zeros_like(gap), where=gap != 0)
                at_axis = before.real + (after.real - before.real) * weight
                return (flips & (at_axis <= 0)) | (np.abs(after) <= limit)
        return np.abs(after) <= limit

    def to_dict(self) -> dict[str, object]:
        return {"kind": self.kind.value, "form": self.render(), "scale": self.scale}


def is_real_valued(e: Expr, real_state: bool = True) -> bool:
    """
    Whether an expression is real-valued on real (t, x), decided from its structure.

    Args:
        e: Expression
        real_state: Whether state variables are real
    """
    match e:
        case Const(value):
            return complex(value).imag == 0
        case Var(kind, _):
            return kind == "t" or real_state
        case LinForm():
            return real_state and e.is_real
        case Re() | Im() | Abs() | Atan2():
            return True
        case Sum(terms):
            return all(is_real_valued(c, real_state) for c in terms)
        case Prod(factors):
            return all(is_real_valued(c, real_state) for c in factors)
        case Pow(base, exponent):
            return complex(exponent).imag == 0 and is_real_valued(base, real_state)
        case Exp(arg):
            return is_real_valued(arg, real_state)
        case Log(arg):
            return False
        case Quadrature():
            return False
    return False


def _scale(e: Expr) -> float:
    return e.scale if isinstance(e, LinForm) else 1.0


def _branch_form(num: Expr, den: Expr) -> Expr:
    if isinstance(num, LinForm) and isinstance(den, LinForm):
        return LinForm(tuple(d + 1j * n for n, d in zip(num.coeffs, den.coeffs, strict=True)))
    return Sum((den, Prod((Const(1j), num))))


def collect_hyperplanes(e: Expr, real_state: bool = True) -> tuple[Hyperplane, ...]:
    """
    Every excluded set of an expression, deduplicated in first-occurrence order.

    Denominators and bases of non-integer powers, logarithm and absolute value
    arguments register their form; atan2 registers den + i*num as a branch.
    """
    found: dict[tuple[str, str], Hyperplane] = {}

    def register(kind: HyperplaneKind, form: Expr) -> None:
        key = (kind.value, render_expr(form))
        found.setdefault(key, Hyperplane(kind, form, _scale(form)))

    for node in walk(e):
        match node:
            case Pow(base, exponent):
                h = complex(exponent)
                real = is_real_valued(base, real_state)
                if node.integral_exponent and h.real >= 0:
                    continue
                if real:
                    register(HyperplaneKind.REAL, base)
                elif node.integral_exponent:
                    register(HyperplaneKind.POINT, base)
                else:
                    register(HyperplaneKind.BRANCH, base)
            case Log(arg):
                if is_real_valued(arg, real_state):
                    register(HyperplaneKind.REAL, arg)
                else:
                    register(HyperplaneKind.BRANCH, arg)
            case Abs(arg):
                if is_real_valued(arg, real_state):
                    register(HyperplaneKind.REAL, arg)
                else:
                    register(HyperplaneKind.POINT, arg)
            case Atan2(num, den):
                register(HyperplaneKind.BRANCH, _branch_form(num, den))
    return tuple(found.values())


def safe_mask(
    hyperplanes: tuple[Hyperplane, ...],
    t: np.ndarray,
    x: np.ndarray,
    margin: float,
    quad: Mapping[str, np.ndarray] | None = None,
) -> np.ndarray:
    """Mask of batch points away from every hyperplane."""
    t = np.atleast_2d(t)
    mask = np.ones(np.atleast_2d(x).shape[0], dtype=bool)
    for plane in hyperplanes:
        mask &= plane.safe(plane.values(t, x, quad), margin)
    return mask


def first_event(
    hyperplanes: tuple[Hyperplane, ...],
    t: np.ndarray,
    x: np.ndarray,
    quad: Mapping[str, np.ndarray] | None = None,
) -> tuple[int, str] | None:
    """
    First step of a trajectory that crosses one of the hyperplanes.

    Args:
        hyperplanes: Excluded sets to watch
        t: Times along the trajectory, shape (K, m)
        x: States along the trajectory, shape (K, d)
        quad: Accumulator values along the trajectory

    Returns:
        (step index, rendered form) of the earliest crossing, or None
    """
    earliest: tuple[int, str] | None = None
    for plane in hyperplanes:
        values = plane.values(t, x, quad)
        hits = np.flatnonzero(plane.crossed(values[:-1], values[1:]))
        if hits.size and (earliest is None or hits[0] + 1 < earliest[0]):
            earliest = (int(hits[0]) + 1, plane.render())
    return earliest
