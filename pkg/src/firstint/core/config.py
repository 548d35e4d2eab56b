"""Analysis configuration model."""

from pydantic import BaseModel, ConfigDict, Field

from firstint.systems.spec import SystemSpec


class AnalysisConfig(BaseModel):
    """Tolerances, sampling policy and verification settings of one run."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    tol: float = Field(default=1e-9, gt=0, description="Relative tolerance of rank decisions")
    seed: int = Field(default=0, ge=0, description="Seed of every random draw")
    step: float = Field(default=1e-3, gt=0, description="Maximal RK4 step")
    trajectories: int = Field(default=20, ge=0, description="Trajectories per verification")
    lie_samples: int = Field(default=200, gt=0, description="Safe points for Lie residuals")
    psi_samples: int = Field(default=100, gt=0, description="Safe points for chain functions")
    reference_samples: int = Field(
        default=50, gt=0, description="Safe points for reference dependence checks"
    )
    mu_tol: float = Field(default=1e-7, gt=0, description="Allowed deviation of chain rates")
    lie_tol: float = Field(default=1e-8, gt=0, description="Acceptance bound of Lie residuals")
    drift_tol: float = Field(default=1e-6, gt=0, description="Acceptance bound of drift")
    gap_tol: float = Field(default=1e-6, gt=0, description="Acceptance bound of path gaps")
    exhaustive: bool = Field(default=False, description="Try every minimal factor subset")
    require_solvable: bool = Field(
        default=False, description="Fail when the system is not completely solvable"
    )
    span: float = Field(default=1.0, gt=0, description="Length of trajectory paths")
    box: float = Field(default=2.0, gt=0, description="Half-width of the sampling box")
    margin: float = Field(default=1e-3, gt=0, description="Relative distance from excluded sets")
    anchor: list[float] | None = Field(
        default=None, description="Base point of quadrature accumulators (zeros when omitted)"
    )
    compat_grid: int = Field(
        default=5, ge=2, description="Grid points per axis of the forcing compatibility check"
    )

    def for_spec(self, spec: SystemSpec) -> "AnalysisConfig":
        """
        Resolve the configuration for a system.

        A document-level tolerance replaces the default one unless the
        tolerance was set explicitly.
        """
        if spec.tol is not None and "tol" not in self.model_fields_set:
            return self.model_copy(update={"tol": spec.tol})
        return self

    def anchor_for(self, spec: SystemSpec) -> tuple[float, ...]:
        return tuple(self.anchor) if self.anchor is not None else (0.0,) * spec.directions
