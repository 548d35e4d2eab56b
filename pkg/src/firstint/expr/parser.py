"""Recursive-descent parser for the expression grammar.

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | '(' expr ')' | cnum | call | 't' idx | 'x' idx
    call   := lin([cnum, ...]) | pow(expr, cnum) | exp(expr) | log(expr) | abs(expr)
            | re(expr) | im(expr) | atan2(expr, expr) | quad(name)
    cnum   := float | '(' float ',' float ')'

Division is accepted on input as a product with a pow(., -1) factor; it is
never produced by the renderer.
"""

import re

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
from firstint.utils.exceptions import InputError

_NUMBER = re.compile(r"-?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_VARIABLE = re.compile(r"([tx])(\d+)")

_UNARY = {"exp": Exp, "log": Log, "abs": Abs, "re": Re, "im": Im}


class _Parser:
    def __init__(self, text: str, pointer: str | None) -> None:
        self.text = text
        self.pos = 0
        self.pointer = pointer

    def error(self, message: str) -> InputError:
        return InputError(
            f"{message} at position {self.pos} in {self.text!r}", pointer=self.pointer
        )

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, token: str) -> None:
        self.skip()
        if not self.text.startswith(token, self.pos):
            raise self.error(f"Expected {token!r}")
        self.pos += len(token)

    def number(self) -> float:
        self.skip()
        match = _NUMBER.match(self.text, self.pos)
        if match is None:
            raise self.error("Expected a number")
        self.pos = match.end()
        return float(match.group())

    def cnum(self) -> complex:
        if self.peek() == "(":
            self.expect("(")
            real = self.number()
            self.expect(",")
            imag = self.number()
            self.expect(")")
            return complex(real, imag)
        return complex(self.number())

    def try_complex_literal(self) -> complex | None:
        start = self.pos
        try:
            return self.cnum()
        except InputError:
            self.pos = start
            return None

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek():
            raise self.error("Unexpected trailing input")
        return e

    def expr(self) -> Expr:
        terms = [self.term()]
        while self.peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            term = self.term()
            if op == "-":
                term = Const(-term.value) if isinstance(term, Const) else Prod((Const(-1), term))
            terms.append(term)
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def term(self) -> Expr:
        factors = [self.factor()]
        while self.peek() in ("*", "/"):
            op = self.text[self.pos]
            self.pos += 1
            factor = self.factor()
            factors.append(factor if op == "*" else Pow(factor, -1))
        return factors[0] if len(factors) == 1 else Prod(tuple(factors))

    def factor(self) -> Expr:
        ch = self.peek()
        if ch == "-":
            if _NUMBER.match(self.text, self.pos):
                return Const(complex(self.number()))
            self.pos += 1
            inner = self.factor()
            return Const(-inner.value) if isinstance(inner, Const) else Prod((Const(-1), inner))
        if ch == "(":
            literal = self.try_complex_literal()
            if literal is not None:
                return Const(literal)
            self.expect("(")
            inner = self.expr()
            self.expect(")")
            return inner
        if ch.isdigit() or ch == ".":
            return Const(complex(self.number()))
        match = _NAME.match(self.text, self.pos)
        if match is None:
            raise self.error("Unexpected character" if ch else "Unexpected end of input")
        name = match.group()
        self.pos = match.end()
        variable = _VARIABLE.fullmatch(name)
        if variable is not None:
            index = int(variable.group(2))
            if index < 1:
                raise self.error("Variable indices start at 1")
            return Var(variable.group(1), index - 1)  # type: ignore[arg-type]
        return self.call(name)

    def call(self, name: str) -> Expr:
        self.expect("(")
        node: Expr
        if name in _UNARY:
            node = _UNARY[name](self.expr())
        elif name == "pow":
            base = self.expr()
            self.expect(",")
            node = Pow(base, self.cnum())
        elif name == "atan2":
            num = self.expr()
            self.expect(",")
            node = Atan2(num, self.expr())
        elif name == "lin":
            self.expect("[")
            coeffs = [self.cnum()]
            while self.peek() == ",":
                self.expect(",")
                coeffs.append(self.cnum())
            self.expect("]")
            node = LinForm(tuple(coeffs))
        elif name == "quad":
            self.skip()
            match = _NAME.match(self.text, self.pos)
            if match is None:
                raise self.error("Expected a quadrature name")
            self.pos = match.end()
            node = Quadrature(match.group())
        else:
            raise self.error(f"Unknown function {name!r}")
        self.expect(")")
        return node


def parse_expr(text: str, pointer: str | None = None) -> Expr:
    """
    Parse an expression string.

    Args:
        text: Expression in the plain grammar
        pointer: JSON pointer reported on errors

    Returns:
        Expression tree

    Raises:
        InputError: If the text is not a valid expression

    Example:
        >>> parse_expr("lin([1,-2,1])")
        LinForm(coeffs=((1+0j), (-2+0j), (1+0j)))
    """
    return _Parser(text, pointer).parse()
