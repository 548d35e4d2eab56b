"""First integral values: expression, provenance and excluded sets."""

from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np

from firstint.expr.hyperplanes import Hyperplane, collect_hyperplanes
from firstint.expr.nodes import Expr, uses_time
from firstint.expr.quadrature import QuadratureSpec, quadrature_env
from firstint.expr.render import canonical, render_expr
from firstint.systems.spec import SystemSpec


class TheoremTag(str, Enum):
    """Construction family an integral comes from."""

    T1_1 = "T1_1"
    T1_2 = "T1_2"
    T1_3 = "T1_3"
    T1_4 = "T1_4"
    T2_1 = "T2_1"
    T2_2 = "T2_2"
    T2_3 = "T2_3"
    T2_4_CASE1 = "T2_4_case1"
    T2_4_CASE2A = "T2_4_case2A"
    T2_4_CASE2B = "T2_4_case2B"
    T2_5 = "T2_5"
    T2_6 = "T2_6"
    T2_7 = "T2_7"
    T2_8 = "T2_8"
    T3_2 = "T3_2"
    T3_3 = "T3_3"
    T3_4 = "T3_4"
    T3_5 = "T3_5"
    T3_6 = "T3_6"
    T3_7 = "T3_7"
    T3_8 = "T3_8"
    T3_9 = "T3_9"
    T3_10 = "T3_10"
    T3_11 = "T3_11"
    T3_12 = "T3_12"
    C2_1 = "C2_1"
    C2_2 = "C2_2"
    C2_3 = "C2_3"
    C2_4 = "C2_4"
    C3_1 = "C3_1"
    C3_2 = "C3_2"
    C3_3 = "C3_3"
    C3_4 = "C3_4"
    C3_5 = "C3_5"
    C3_6 = "C3_6"
    C3_7 = "C3_7"
    PSI_DIRECT = "PsiDirect"

    @property
    def priority(self) -> int:
        """Selection group: eigenvector < conjugate pair < Jordan < nonautonomous < forced."""
        return _PRIORITY[self]


_PRIORITY: dict[TheoremTag, int] = {
    **dict.fromkeys(
        (TheoremTag.T1_1, TheoremTag.T2_1, TheoremTag.C2_1, TheoremTag.T3_2, TheoremTag.C3_1,
         TheoremTag.C3_2),
        0,
    ),
    **dict.fromkeys(
        (TheoremTag.T2_2, TheoremTag.T2_3, TheoremTag.T3_3, TheoremTag.T3_4, TheoremTag.T3_5), 1
    ),
    **dict.fromkeys(
        (TheoremTag.T1_2, TheoremTag.T2_4_CASE1, TheoremTag.T2_4_CASE2A, TheoremTag.T2_4_CASE2B,
         TheoremTag.T3_6, TheoremTag.T3_7, TheoremTag.C3_3, TheoremTag.C3_4, TheoremTag.C3_5,
         TheoremTag.PSI_DIRECT),
        2,
    ),
    **dict.fromkeys(
        (TheoremTag.T1_3, TheoremTag.T1_4, TheoremTag.T2_5, TheoremTag.T2_6, TheoremTag.C2_2,
         TheoremTag.C2_3, TheoremTag.T3_8, TheoremTag.T3_9, TheoremTag.C3_6),
        3,
    ),
    **dict.fromkeys(
        (TheoremTag.T2_7, TheoremTag.T2_8, TheoremTag.C2_4, TheoremTag.T3_10, TheoremTag.T3_11,
         TheoremTag.T3_12, TheoremTag.C3_7),
        4,
    ),
}


@dataclass(frozen=True, eq=False)
class FirstIntegral:
    """
    A constructed first integral.

    Attributes:
        expr: The integral as an expression over (t, x)
        autonomous: Whether the expression is time independent
        theorem_tag: Construction family
        excluded_hyperplanes: Every denominator, log/atan2 argument and power base
        provenance: Tuples and chain functions the integral is built from
        quadratures: Accumulators referenced by Quadrature nodes
        notes: Classification remarks
    """

    expr: Expr
    autonomous: bool
    theorem_tag: TheoremTag
    excluded_hyperplanes: tuple[Hyperplane, ...]
    provenance: tuple[str, ...]
    quadratures: tuple[QuadratureSpec, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def rendered(self) -> str:
        return render_expr(self.expr)

    def quad_env(self, t: np.ndarray) -> tuple[dict[str, np.ndarray], dict[str, np.ndarray]]:
        """Accumulator values and integrand rates at a batch of times."""
        return quadrature_env(self.quadratures, t)

    def to_dict(self) -> dict[str, Any]:
        return {
            "expr": self.rendered,
            "autonomous": self.autonomous,
            "theorem_tag": self.theorem_tag.value,
            "excluded_hyperplanes": [h.to_dict() for h in self.excluded_hyperplanes],
            "provenance": list(self.provenance),
            "quadratures": [q.to_dict() for q in self.quadratures],
            "notes": list(self.notes),
        }


def make_integral(
    expr: Expr,
    tag: TheoremTag,
    provenance: Sequence[str],
    spec: SystemSpec,
    quadratures: Sequence[QuadratureSpec] = (),
    notes: Sequence[str] = (),
) -> FirstIntegral:
    """Canonicalize an expression and register its excluded sets."""
    expr = canonical(expr)
    return FirstIntegral(
        expr=expr,
        autonomous=not uses_time(expr),
        theorem_tag=tag,
        excluded_hyperplanes=collect_hyperplanes(expr, spec.real_state),
        provenance=tuple(provenance),
        quadratures=tuple(quadratures),
        notes=tuple(notes),
    )
