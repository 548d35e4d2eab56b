"""Deterministic textual rendering and canonical ordering of expressions."""

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
from firstint.utils.helpers import format_complex


def _factor(e: Expr) -> str:
    text = render_expr(e)
    return f"({text})" if isinstance(e, (Sum, Prod)) else text


def render_expr(e: Expr) -> str:
    """
    Render an expression in the plain expression grammar.

    Sum and product children are ordered lexicographically by their own
    rendering, so equal trees up to child order render identically.

    Example:
        >>> render_expr(LinForm((1, -1, 1, -1)))
        'lin([1,-1,1,-1])'
    """
    match e:
        case Const(value):
            return format_complex(value)
        case Var(kind, index):
            return f"{kind}{index + 1}"
        case LinForm(coeffs):
            return "lin([" + ",".join(format_complex(c) for c in coeffs) + "])"
        case Re(arg):
            return f"re({render_expr(arg)})"
        case Im(arg):
            return f"im({render_expr(arg)})"
        case Sum(terms):
            parts = [f"({render_expr(t)})" if isinstance(t, Sum) else render_expr(t) for t in terms]
            return " + ".join(sorted(parts))
        case Prod(factors):
            return "*".join(sorted(_factor(f) for f in factors))
        case Pow(base, exponent):
            return f"pow({render_expr(base)},{format_complex(exponent)})"
        case Exp(arg):
            return f"exp({render_expr(arg)})"
        case Log(arg):
            return f"log({render_expr(arg)})"
        case Abs(arg):
            return f"abs({render_expr(arg)})"
        case Atan2(num, den):
            return f"atan2({render_expr(num)},{render_expr(den)})"
        case Quadrature(name):
            return f"quad({name})"
    raise TypeError(f"Unknown expression node {type(e).__name__}")


def _sorted(children: list[Expr]) -> tuple[Expr, ...]:
    return tuple(sorted(children, key=render_expr))


def canonical(e: Expr) -> Expr:
    """
    Flatten nested sums and products, fold constants and order children.

    No other simplification is done, so the domain of the expression is
    unchanged.

    Example:
        >>> canonical(Sum((Const(1), Sum((Var("x", 0), Const(2))))))
        Sum(terms=(Const(value=(3+0j)), Var(kind='x', index=0)))
    """
    match e:
        case Sum(terms):
            flat: list[Expr] = []
            total = 0j
            for term in (canonical(t) for t in terms):
                parts = term.terms if isinstance(term, Sum) else (term,)
                for part in parts:
                    if isinstance(part, Const):
                        total += part.value
                    else:
                        flat.append(part)
            if total != 0 or not flat:
                flat.append(Const(total))
            return flat[0] if len(flat) == 1 else Sum(_sorted(flat))
        case Prod(factors):
            flat = []
            coeff = 1 + 0j
            for factor in (canonical(f) for f in factors):
                parts = factor.factors if isinstance(factor, Prod) else (factor,)
                for part in parts:
                    if isinstance(part, Const):
                        coeff *= part.value
                    else:
                        flat.append(part)
            if coeff != 1 or not flat:
                flat.append(Const(coeff))
            return flat[0] if len(flat) == 1 else Prod(_sorted(flat))
        case Pow(base, exponent):
            return Pow(canonical(base), complex(exponent))
        case Re(arg):
            return Re(canonical(arg))
        case Im(arg):
            return Im(canonical(arg))
        case Exp(arg):
            return Exp(canonical(arg))
        case Log(arg):
            return Log(canonical(arg))
        case Abs(arg):
            return Abs(canonical(arg))
        case Atan2(num, den):
            return Atan2(canonical(num), canonical(den))
        case Const(value):
            return Const(complex(value))
        case LinForm(coeffs):
            return LinForm(tuple(complex(c) for c in coeffs))
    return e
