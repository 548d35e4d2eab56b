"""System specification: document model, validation and the SystemSpec value."""

import json
from collections.abc import Mapping
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from firstint.expr.evaluate import evaluate
from firstint.expr.nodes import Expr, uses_state
from firstint.expr.parser import parse_expr
from firstint.linalg.elimination import as_cmatrix
from firstint.utils.config import load_document
from firstint.utils.exceptions import InputError
from firstint.utils.logger import get_logger

logger = get_logger(__name__)

Number = float | tuple[float, float]

RLINEAR_FORCING_UNSUPPORTED = (
    "Forcing is not supported for R-linear systems; write the system in real coordinates "
    "as a forced total system on 2n unknowns instead"
)


class SystemKind(str, Enum):
    """Kind of linear differential system."""

    ODE = "ode"
    TOTAL = "total"
    RLINEAR = "rlinear"


class FieldKind(str, Enum):
    """Scalar field of the matrix entries."""

    REAL = "real"
    COMPLEX = "complex"


class PivotOverride(BaseModel):
    """Operator whose Jordan chains are tried first for one pivot eigenvalue."""

    model_config = ConfigDict(extra="forbid")

    eigenvalue: Number = Field(..., description="Eigenvalue of the pivot matrix")
    matrix: int = Field(..., ge=0, description="Index of the operator to take chains from")


class SystemDocument(BaseModel):
    """Input document describing a system."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    kind: SystemKind
    n: int = Field(..., ge=1, le=32, description="State dimension")
    m: int | None = Field(default=None, ge=1, description="Number of independent variables")
    matrices: list[list[list[Number]]] | None = Field(
        default=None, description="One coefficient matrix per independent variable"
    )
    convention: Literal["field", "operator"] = Field(
        default="field",
        description="field: dx = sum_j (M_j x + f_j) dt_j; operator: matrices act on forms",
    )
    rlinear_coeffs: list[list[list[Number]]] | None = Field(
        default=None, description="Tensor a[tau][k][rho] of an R-linear system"
    )
    forcing: list[list[str]] | None = Field(
        default=None, description="Forcing expressions per independent variable and component"
    )
    tol: float | None = Field(default=None, gt=0, description="Tolerance override")
    pivot_overrides: list[PivotOverride] = Field(
        default_factory=list, description="Per-eigenvalue choice of the chain operator"
    )
    reference: list[str] = Field(
        default_factory=list, description="Known first integrals for cross-checking"
    )
    name: str | None = Field(default=None, description="Short label")
    description: str | None = Field(default=None, description="Free-form notes")


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """
    A validated constant-coefficient linear system.

    Matrices are stored in the field convention: along independent variable j
    the state moves with M_j x + f_j(t). For R-linear systems the state is
    gamma = (w, conj(w)) of dimension 2n and there are 2m matrices, one per
    dz_j and dz̄_j.

    Attributes:
        kind: System kind
        n: Number of unknowns (complex unknowns for R-linear systems)
        m: Number of independent variables (complex ones for R-linear systems)
        matrices: Field matrices
        forcing: Per independent variable, the forcing components as time-only expressions
        field: Real or complex coefficients
        tol: Document tolerance override
        references: Known first integrals
        name: Label used in reports
        pivot_overrides: (pivot eigenvalue, operator index) pairs for chain selection
    """

    kind: SystemKind
    n: int
    m: int
    matrices: tuple[np.ndarray, ...]
    forcing: tuple[tuple[Expr, ...], ...] | None = None
    field: FieldKind = FieldKind.REAL
    tol: float | None = None
    references: tuple[Expr, ...] = ()
    name: str | None = None
    reference_text: tuple[str, ...] = ()
    pivot_overrides: tuple[tuple[complex, int], ...] = ()

    @cached_property
    def operators(self) -> tuple[np.ndarray, ...]:
        """Operator matrices B_j = M_j^T: the derivative of nu.x along j is (B_j nu).x."""
        return tuple(np.ascontiguousarray(m.T) for m in self.matrices)

    @property
    def state_dim(self) -> int:
        return 2 * self.n if self.kind is SystemKind.RLINEAR else self.n

    @property
    def directions(self) -> int:
        """Number of real independent variables."""
        return 2 * self.m if self.kind is SystemKind.RLINEAR else self.m

    @property
    def is_forced(self) -> bool:
        return self.forcing is not None

    @property
    def real_state(self) -> bool:
        """Whether the state variables are real."""
        return self.kind is not SystemKind.RLINEAR

    @cached_property
    def direction_matrices(self) -> tuple[np.ndarray, ...]:
        """
        Field matrix along each real independent variable.

        For R-linear systems the variables are (Re z_1..Re z_m, Im z_1..Im z_m)
        with fields V_j + V_{m+j} and i(V_j - V_{m+j}).
        """
        if self.kind is not SystemKind.RLINEAR:
            return self.matrices
        m = self.m
        along_re = [self.matrices[j] + self.matrices[m + j] for j in range(m)]
        along_im = [1j * (self.matrices[j] - self.matrices[m + j]) for j in range(m)]
        return tuple(along_re + along_im)

    def direction_matrix(self, j: int) -> np.ndarray:
        return self.direction_matrices[j]

    def forcing_values(self, j: int, t: np.ndarray) -> np.ndarray:
        """f_j at a batch of times, shape (N, n); zeros for homogeneous systems."""
        t = np.atleast_2d(np.asarray(t, dtype=float))
        if self.forcing is None:
            return np.zeros((t.shape[0], self.state_dim), dtype=complex)
        empty = np.zeros((t.shape[0], 0), dtype=complex)
        return np.column_stack([evaluate(c, t, empty) for c in self.forcing[j]])

    def vector_field(self, j: int, t: np.ndarray, x: np.ndarray) -> np.ndarray:
        """M_j x + f_j(t) on a batch, shape (N, state_dim)."""
        x = np.atleast_2d(x)
        if x.shape[1] != self.state_dim:
            raise InputError(
                f"States have {x.shape[1]} coordinates, expected {self.state_dim}"
            )
        out = x @ self.direction_matrix(j).T
        if self.forcing is not None:
            out = out + self.forcing_values(j, t)
        return out

    @classmethod
    def from_file(cls, path: str | Path) -> "SystemSpec":
        """Load and validate a JSON or YAML system document."""
        return parse_spec(load_document(path))

    @classmethod
    def from_dict(cls, document: Mapping[str, Any]) -> "SystemSpec":
        return parse_spec(document)


def _pointer(loc: tuple[int | str, ...]) -> str:
    return "/" + "/".join(str(part) for part in loc)


def _matrix(data: list[list[Number]], pointer: str, shape: tuple[int, int]) -> np.ndarray:
    rows = [[complex(*e) if isinstance(e, tuple) else complex(e) for e in row] for row in data]
    for i, row in enumerate(rows):
        if len(row) != shape[1]:
            raise InputError(
                f"Row has {len(row)} entries, expected {shape[1]}", pointer=f"{pointer}/{i}"
            )
    if len(rows) != shape[0]:
        raise InputError(f"Matrix has {len(rows)} rows, expected {shape[0]}", pointer=pointer)
    return as_cmatrix(rows, pointer)


def _forcing(doc: SystemDocument, m: int) -> tuple[tuple[Expr, ...], ...] | None:
    if doc.forcing is None:
        return None
    if len(doc.forcing) != m:
        raise InputError(
            f"Forcing has {len(doc.forcing)} entries, expected one per independent variable ({m})",
            pointer="/forcing",
        )
    terms = []
    for j, components in enumerate(doc.forcing):
        if len(components) != doc.n:
            raise InputError(
                f"Forcing term has {len(components)} components, expected {doc.n}",
                pointer=f"/forcing/{j}",
            )
        parsed = []
        for i, text in enumerate(components):
            pointer = f"/forcing/{j}/{i}"
            e = parse_expr(text, pointer)
            if uses_state(e):
                raise InputError("Forcing may only depend on time variables", pointer=pointer)
            parsed.append(e)
        terms.append(tuple(parsed))
    return tuple(terms)


def _overrides(doc: SystemDocument, operators: int) -> tuple[tuple[complex, int], ...]:
    out = []
    for i, item in enumerate(doc.pivot_overrides):
        if item.matrix >= operators:
            raise InputError(
                f"Operator index {item.matrix} out of range for {operators} operators",
                pointer=f"/pivot_overrides/{i}/matrix",
            )
        value = item.eigenvalue
        out.append((complex(*value) if isinstance(value, tuple) else complex(value), item.matrix))
    return tuple(out)


def parse_spec(document: bytes | str | Mapping[str, Any]) -> SystemSpec:
    """
    Parse and validate a system document.

    Args:
        document: JSON text (bytes or str) or an already decoded mapping

    Returns:
        Validated SystemSpec with field-convention matrices

    Raises:
        InputError: If the document is malformed; the pointer locates the problem

    Example:
        >>> spec = parse_spec('{"kind": "ode", "n": 1, "matrices": [[[0]]]}')
        >>> (spec.kind.value, spec.n, spec.m)
        ('ode', 1, 1)
    """
    if isinstance(document, (bytes, str)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise InputError(f"Invalid JSON: {e.msg}", pointer="") from e
    if not isinstance(document, Mapping):
        raise InputError("Document root must be an object", pointer="")

    try:
        doc = SystemDocument.model_validate(document)
    except ValidationError as e:
        first = e.errors()[0]
        raise InputError(f"Invalid document: {first['msg']}", pointer=_pointer(first["loc"])) from e

    if doc.kind is SystemKind.RLINEAR:
        from firstint.systems.rlinear import embed_rlinear

        if doc.rlinear_coeffs is None:
            raise InputError("R-linear documents need rlinear_coeffs", pointer="/rlinear_coeffs")
        if doc.matrices is not None:
            raise InputError(
                "R-linear documents take rlinear_coeffs, not matrices", pointer="/matrices"
            )
        if doc.forcing is not None:
            raise InputError(RLINEAR_FORCING_UNSUPPORTED, pointer="/forcing")
        spec = embed_rlinear(
            {"n": doc.n, "m": doc.m or 1, "coefficients": doc.rlinear_coeffs},
            tol=doc.tol,
            references=doc.reference,
            name=doc.name,
        )
        spec = replace(spec, pivot_overrides=_overrides(doc, 2 * spec.m))
        logger.debug("spec_parsed", kind=spec.kind.value, n=spec.n, m=spec.m)
        return spec

    if doc.rlinear_coeffs is not None:
        raise InputError("rlinear_coeffs is only valid for kind rlinear", pointer="/rlinear_coeffs")
    if doc.matrices is None:
        raise InputError("Missing matrices", pointer="/matrices")
    m = doc.m if doc.m is not None else len(doc.matrices)
    if doc.kind is SystemKind.ODE and m != 1:
        raise InputError(f"ODE systems have m = 1, got {m}", pointer="/m")
    if len(doc.matrices) != m:
        raise InputError(f"Expected {m} matrices, got {len(doc.matrices)}", pointer="/matrices")

    matrices = []
    for j, data in enumerate(doc.matrices):
        matrix = _matrix(data, f"/matrices/{j}", (doc.n, doc.n))
        matrices.append(matrix.T.copy() if doc.convention == "operator" else matrix)
    field_kind = (
        FieldKind.REAL if all(np.all(mat.imag == 0) for mat in matrices) else FieldKind.COMPLEX
    )
    references = tuple(
        parse_expr(text, f"/reference/{i}") for i, text in enumerate(doc.reference)
    )
    spec = SystemSpec(
        kind=doc.kind,
        n=doc.n,
        m=m,
        matrices=tuple(matrices),
        forcing=_forcing(doc, m),
        field=field_kind,
        tol=doc.tol,
        references=references,
        name=doc.name,
        reference_text=tuple(doc.reference),
        pivot_overrides=_overrides(doc, m),
    )
    logger.debug("spec_parsed", kind=spec.kind.value, n=spec.n, m=spec.m, forced=spec.is_forced)
    return spec
