"""Expression trees: nodes, grammar, evaluation and Lie derivatives."""

from firstint.expr.evaluate import Point, eval_dual, eval_expr, evaluate, evaluate_dual
from firstint.expr.hyperplanes import (
    Hyperplane,
    HyperplaneKind,
    collect_hyperplanes,
    first_event,
    safe_mask,
)
from firstint.expr.lie import lie_batch, lie_derivative
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
from firstint.expr.parser import parse_expr
from firstint.expr.quadrature import QuadratureSpec, quadrature_env
from firstint.expr.render import canonical, render_expr

__all__ = [
    "Point",
    "eval_dual",
    "eval_expr",
    "evaluate",
    "evaluate_dual",
    "Hyperplane",
    "HyperplaneKind",
    "collect_hyperplanes",
    "first_event",
    "safe_mask",
    "lie_batch",
    "lie_derivative",
    "Abs",
    "Atan2",
    "Const",
    "Exp",
    "Expr",
    "Im",
    "LinForm",
    "Log",
    "Pow",
    "Prod",
    "Quadrature",
    "Re",
    "Sum",
    "Var",
    "parse_expr",
    "QuadratureSpec",
    "quadrature_env",
    "canonical",
    "render_expr",
]
