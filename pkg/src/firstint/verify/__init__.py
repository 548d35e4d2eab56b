"""Numerical verification of constructed first integrals."""

from firstint.verify.checks import (
    DependenceResult,
    DriftResult,
    constancy_check,
    functional_dependence,
    independence_check,
    lie_residual_check,
    trajectory_drift,
)
from firstint.verify.integrator import (
    TrajectorySample,
    axis_path,
    integrate_trajectory,
    path_independence_check,
)
from firstint.verify.report import IntegralCheck, ReferenceCheck, VerificationReport
from firstint.verify.runner import verify_integrals

__all__ = [
    "DependenceResult",
    "DriftResult",
    "IntegralCheck",
    "ReferenceCheck",
    "TrajectorySample",
    "VerificationReport",
    "axis_path",
    "constancy_check",
    "functional_dependence",
    "independence_check",
    "integrate_trajectory",
    "lie_residual_check",
    "path_independence_check",
    "trajectory_drift",
    "verify_integrals",
]
