"""Machine-readable verification results."""

from typing import Any

from pydantic import BaseModel, ConfigDict, Field


class IntegralCheck(BaseModel):
    """Verification statistics of one integral."""

    model_config = ConfigDict(extra="forbid")

    expr: str = Field(description="Rendered integral")
    theorem_tag: str = Field(description="Construction family")
    max_lie_residual: float | None = Field(description="Largest scaled Lie derivative")
    max_trajectory_drift: float | None = Field(description="Largest relative drift")
    samples_used: int = Field(description="Trajectories that contributed a drift")
    domain_events: list[str] = Field(default_factory=list, description="Excluded sets crossed")
    errors: list[str] = Field(default_factory=list, description="Checks that could not run")
    passed: bool = Field(description="Residual and drift within tolerance")


class ReferenceCheck(BaseModel):
    """Functional dependence of a reference integral on the constructed set."""

    model_config = ConfigDict(extra="forbid")

    reference: str
    dependent: bool
    points: int
    failures: int


class VerificationReport(BaseModel):
    """
    Outcome of the numerical verification of a general integral.

    Given the same system, configuration and seed the report is identical.
    """

    model_config = ConfigDict(extra="forbid")

    solvability: dict[str, Any] = Field(description="Solvability verdict")
    integrals: list[IntegralCheck] = Field(default_factory=list)
    references: list[ReferenceCheck] = Field(default_factory=list)
    independence_rank: int = Field(description="Jacobian rank of the selected integrals")
    redundant: list[str] = Field(
        default_factory=list, description="Integrals whose removal keeps the Jacobian rank"
    )
    autonomous_count: int = Field(description="Number of selected autonomous integrals")
    path_independence_gap: float | None = Field(
        default=None, description="Axis polyline against straight segment (total and R-linear)"
    )
    trajectories: int = Field(description="Trajectories integrated")
    overflowed: int = Field(default=0, description="Trajectories discarded on overflow")
    seed: int
    lie_tol: float
    drift_tol: float
    gap_tol: float
    box: float
    margin: float
    passed: bool

    @property
    def failures(self) -> list[str]:
        out = [c.expr for c in self.integrals if not c.passed]
        out += [r.reference for r in self.references if not r.dependent]
        if self.path_independence_gap is not None and self.path_independence_gap > self.gap_tol:
            out.append(f"path independence gap {self.path_independence_gap:.3e}")
        out += [f"redundant {expr}" for expr in self.redundant]
        if self.integrals and self.independence_rank == 0:
            out.append("independence rank unavailable")
        return out
