"""System specifications and solvability checks."""

from firstint.systems.frobenius import (
    SolvabilityVerdict,
    commutator_residual,
    default_grid,
    forcing_compat_check,
    frobenius_check,
)
from firstint.systems.rlinear import conjugation_defect, embed_rlinear, embed_state
from firstint.systems.sampling import random_points, safe_points, state_directions
from firstint.systems.spec import (
    FieldKind,
    SystemDocument,
    SystemKind,
    SystemSpec,
    parse_spec,
)

__all__ = [
    "SolvabilityVerdict",
    "commutator_residual",
    "default_grid",
    "forcing_compat_check",
    "frobenius_check",
    "conjugation_defect",
    "embed_rlinear",
    "embed_state",
    "random_points",
    "safe_points",
    "state_directions",
    "FieldKind",
    "SystemDocument",
    "SystemKind",
    "SystemSpec",
    "parse_spec",
]
