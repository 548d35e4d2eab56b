"""Report models of an analysis run."""

from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from firstint.verify.report import VerificationReport

SCHEMA_VERSION = "1.0"


class SystemSummary(BaseModel):
    """Identification of the analysed system."""

    model_config = ConfigDict(extra="forbid")

    name: str | None = None
    kind: str
    field: str
    n: int
    m: int
    forced: bool


class EigenvalueEntry(BaseModel):
    """A distinct eigenvalue of one operator."""

    model_config = ConfigDict(extra="forbid")

    value: float | list[float]
    multiplicity: int
    divisor_degrees: list[int]


class AnalysisReport(BaseModel):
    """
    Machine-readable result of analyze and verify.

    The report holds no timestamps or run identifiers: equal inputs and seed
    give byte-identical JSON.
    """

    model_config = ConfigDict(extra="forbid")

    schema_version: str = Field(default=SCHEMA_VERSION, description="Report schema version")
    system: SystemSummary
    config: dict[str, Any] = Field(description="Resolved analysis configuration")
    solvability: dict[str, Any]
    spectrum: list[list[EigenvalueEntry]] = Field(
        default_factory=list, description="Eigenvalues per operator matrix"
    )
    pivot: int | None = None
    tuples: list[dict[str, Any]] = Field(default_factory=list)
    chains: list[dict[str, Any]] = Field(default_factory=list)
    candidates: int = Field(default=0, description="Integrals constructed before selection")
    integrals: list[dict[str, Any]] = Field(
        default_factory=list, description="Selected general integral"
    )
    general_integral: dict[str, Any] | None = None
    notes: list[str] = Field(default_factory=list)
    verification: VerificationReport | None = None

    def to_json(self) -> str:
        return self.model_dump_json(indent=2) + "\n"
