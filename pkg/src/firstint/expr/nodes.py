"""Immutable expression tree nodes.

Variables are indexed from 0 internally and rendered 1-based (``t1``, ``x1``).
"""

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np


@dataclass(frozen=True)
class Expr:
    """Base class of all expression nodes."""

    def children(self) -> tuple["Expr", ...]:
        """Direct sub-expressions."""
        return ()


@dataclass(frozen=True)
class Const(Expr):
    value: complex


@dataclass(frozen=True)
class Var(Expr):
    kind: Literal["t", "x"]
    index: int


@dataclass(frozen=True)
class LinForm(Expr):
    """The linear form nu . x over the state variables."""

    coeffs: tuple[complex, ...]

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=complex)

    @property
    def is_real(self) -> bool:
        return all(c.imag == 0 for c in self.coeffs)

    @property
    def scale(self) -> float:
        """1-norm of the coefficient vector."""
        return float(sum(abs(c) for c in self.coeffs))


@dataclass(frozen=True)
class Re(Expr):
    arg: Expr

    def children(self) -> tuple[Expr, ...]:
        return (self.arg,)


@dataclass(frozen=True)
class Im(Expr):
    arg: Expr

    def children(self) -> tuple[Expr, ...]:
        return (self.arg,)


@dataclass(frozen=True)
class Sum(Expr):
    terms: tuple[Expr, ...]

    def children(self) -> tuple[Expr, ...]:
        return self.terms


@dataclass(frozen=True)
class Prod(Expr):
    factors: tuple[Expr, ...]

    def children(self) -> tuple[Expr, ...]:
        return self.factors


@dataclass(frozen=True)
class Pow(Expr):
    """base ** exponent with a constant exponent."""

    base: Expr
    exponent: complex

    def children(self) -> tuple[Expr, ...]:
        return (self.base,)

    @property
    def integral_exponent(self) -> bool:
        h = complex(self.exponent)
        return h.imag == 0 and float(h.real).is_integer()


@dataclass(frozen=True)
class Exp(Expr):
    arg: Expr

    def children(self) -> tuple[Expr, ...]:
        return (self.arg,)


@dataclass(frozen=True)
class Log(Expr):
    """Principal-branch logarithm."""

    arg: Expr

    def children(self) -> tuple[Expr, ...]:
        return (self.arg,)


@dataclass(frozen=True)
class Abs(Expr):
    arg: Expr

    def children(self) -> tuple[Expr, ...]:
        return (self.arg,)


@dataclass(frozen=True)
class Atan2(Expr):
    """Two-argument arctangent of num/den with range (-pi, pi]."""

    num: Expr
    den: Expr

    def children(self) -> tuple[Expr, ...]:
        return (self.num, self.den)


@dataclass(frozen=True)
class Quadrature(Expr):
    """Reference to an accumulator integrated alongside trajectories."""

    name: str


def walk(e: Expr) -> Iterator[Expr]:
    """Pre-order traversal of all nodes."""
    yield e
    for child in e.children():
        yield from walk(child)


def quadrature_names(e: Expr) -> tuple[str, ...]:
    """Distinct quadrature names in first-occurrence order."""
    seen: dict[str, None] = {}
    for node in walk(e):
        if isinstance(node, Quadrature):
            seen.setdefault(node.name, None)
    return tuple(seen)


def uses_time(e: Expr) -> bool:
    """Whether any time variable or quadrature appears in the tree."""
    return any(
        isinstance(node, Quadrature) or (isinstance(node, Var) and node.kind == "t")
        for node in walk(e)
    )


def uses_state(e: Expr) -> bool:
    """Whether any state variable or linear form appears in the tree."""
    return any(
        isinstance(node, LinForm) or (isinstance(node, Var) and node.kind == "x")
        for node in walk(e)
    )


# Construction helpers. They do no simplification beyond what is stated.


def const(value: complex) -> Const:
    return Const(complex(value))


def lin(coeffs: Iterable[complex]) -> LinForm:
    return LinForm(tuple(complex(c) for c in coeffs))


def t_var(index: int) -> Var:
    return Var("t", index)


def add(*terms: Expr) -> Expr:
    """Sum of the terms; a single term is returned as is."""
    return terms[0] if len(terms) == 1 else Sum(tuple(terms))


def mul(*factors: Expr) -> Expr:
    """Product of the factors; a single factor is returned as is."""
    return factors[0] if len(factors) == 1 else Prod(tuple(factors))


def scaled(c: complex, e: Expr) -> Expr:
    """c * e, dropping a unit factor."""
    c = complex(c)
    return e if c == 1 else Prod((Const(c), e))


def neg(e: Expr) -> Expr:
    return scaled(-1, e)


def div(num: Expr, den: Expr) -> Expr:
    return mul(num, Pow(den, -1))


def linear_time(rates: Sequence[complex]) -> Expr:
    """The form sum_j rates[j] * t_j (zero rates omitted)."""
    terms = [scaled(r, t_var(j)) for j, r in enumerate(rates) if complex(r) != 0]
    return add(*terms) if terms else Const(0j)
