"""Complete solvability: commutation of the coefficient matrices and forcing compatibility."""

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

from firstint.linalg.elimination import inf_norm
from firstint.systems.spec import RLINEAR_FORCING_UNSUPPORTED, SystemKind, SystemSpec
from firstint.utils.exceptions import InputError
from firstint.utils.helpers import vector_to_json
from firstint.utils.logger import get_logger

logger = get_logger(__name__)

# central differences limit the attainable accuracy of the forcing residual
FORCING_TOL_FLOOR = 1e-6


@dataclass(frozen=True, eq=False)
class SolvabilityVerdict:
    """
    Outcome of the Frobenius and forcing-compatibility checks.

    The defect witness is the field-convention bracket matrix
    M_z M_j - M_j M_z of the worst pair (j, z), j < z, i.e. the linear vector
    field of the commutator of the two directional generators.
    """

    solvable: bool
    max_commutator_residual: float
    offending_pair: tuple[int, int] | None = None
    forcing_residual: float | None = None
    defect_witness: np.ndarray | None = None
    tol: float = 1e-9
    grid: tuple[tuple[float, ...], ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "solvable": self.solvable,
            "max_commutator_residual": self.max_commutator_residual,
            "offending_pair": list(self.offending_pair) if self.offending_pair else None,
            "forcing_residual": self.forcing_residual,
            "defect_witness": (
                [vector_to_json(row) for row in self.defect_witness]
                if self.defect_witness is not None
                else None
            ),
            "tol": self.tol,
            "compat_grid_points": len(self.grid),
        }


def commutator_residual(
    matrices: Sequence[np.ndarray],
) -> tuple[float, tuple[int, int] | None]:
    """Worst normalized commutator over all pairs and the pair attaining it."""
    worst, pair = 0.0, None
    for j in range(len(matrices)):
        for z in range(j + 1, len(matrices)):
            a, b = matrices[j], matrices[z]
            residual = inf_norm(a @ b - b @ a) / (1.0 + inf_norm(a) * inf_norm(b))
            if residual > worst:
                worst, pair = residual, (j, z)
    return worst, pair


def default_grid(m: int, points: int = 5, low: float = -1.0, high: float = 1.0) -> np.ndarray:
    """Tensor grid with the given number of points per axis, shape (points**m, m)."""
    axis = np.linspace(low, high, points)
    mesh = np.meshgrid(*([axis] * m), indexing="ij")
    return np.column_stack([g.ravel() for g in mesh])


def frobenius_check(
    spec: SystemSpec, tol: float = 1e-9, grid: np.ndarray | None = None
) -> SolvabilityVerdict:
    """
    Check the Frobenius conditions M_j M_z = M_z M_j and, for forced systems,
    the compatibility of the forcing.

    The residual of a pair is ||B_j B_z - B_z B_j||_inf / (1 + ||B_j||_inf ||B_z||_inf)
    over the operator matrices; ODE systems are always solvable.

    Args:
        spec: Validated system
        tol: Solvability tolerance
        grid: Time points for the forcing check (default 5 per axis on [-1, 1])

    Returns:
        SolvabilityVerdict

    Example:
        >>> eye = np.eye(2)
        >>> spec = SystemSpec(SystemKind.TOTAL, 2, 2, (eye, eye))
        >>> frobenius_check(spec).solvable
        True
    """
    worst, pair = commutator_residual(spec.operators)

    forcing_residual = None
    points: tuple[tuple[float, ...], ...] = ()
    if spec.is_forced and spec.kind is SystemKind.TOTAL:
        grid = default_grid(spec.directions) if grid is None else np.atleast_2d(grid)
        points = tuple(tuple(float(v) for v in row) for row in grid)
        forcing_residual = forcing_compat_check(spec, grid, tol)

    forcing_ok = forcing_residual is None or forcing_residual <= max(tol, FORCING_TOL_FLOOR)
    solvable = worst <= tol and forcing_ok
    witness = None
    if worst > tol and pair is not None:
        mj, mz = spec.matrices[pair[0]], spec.matrices[pair[1]]
        witness = mz @ mj - mj @ mz
    verdict = SolvabilityVerdict(
        solvable=solvable,
        max_commutator_residual=worst,
        offending_pair=pair if worst > tol else None,
        forcing_residual=forcing_residual,
        defect_witness=witness,
        tol=tol,
        grid=points,
    )
    log = logger.info if solvable else logger.warning
    log(
        "frobenius_checked",
        solvable=solvable,
        residual=worst,
        forcing_residual=forcing_residual,
        pair=pair if worst > tol else None,
    )
    return verdict


def forcing_compat_check(
    spec: SystemSpec, sample_grid: Sequence[Sequence[float]] | np.ndarray, tol: float = 1e-9
) -> float:
    """
    Residual of the compatibility conditions of a forced total system.

    At every grid point evaluates
    d_z f_j + M_j f_z - d_j f_z - M_z f_j over all pairs j < z, with partial
    derivatives by central differences of step 1e-6 * (1 + |t|).

    Args:
        spec: Forced system
        sample_grid: Time points, shape (K, m)
        tol: Tolerance used for logging the verdict

    Returns:
        Max infinity norm of the residual over the grid

    Raises:
        InputError: If the system has no forcing or is R-linear
    """
    if spec.forcing is None:
        raise InputError("System has no forcing", pointer="/forcing")
    if spec.kind is SystemKind.RLINEAR:
        raise InputError(RLINEAR_FORCING_UNSUPPORTED, pointer="/forcing")
    grid = np.atleast_2d(np.asarray(sample_grid, dtype=float))
    m = spec.directions
    if grid.shape[1] != m:
        raise InputError(f"Grid points have {grid.shape[1]} coordinates, expected {m}")

    def partial(j: int, z: int) -> np.ndarray:
        h = 1e-6 * (1.0 + np.abs(grid[:, z]))
        shift = np.zeros_like(grid)
        shift[:, z] = h
        ahead = spec.forcing_values(j, grid + shift)
        behind = spec.forcing_values(j, grid - shift)
        return (ahead - behind) / (2.0 * h[:, None])

    values = [spec.forcing_values(j, grid) for j in range(m)]
    worst = 0.0
    for j in range(m):
        for z in range(j + 1, m):
            mj, mz = spec.matrices[j], spec.matrices[z]
            residual = partial(j, z) + values[z] @ mj.T - partial(z, j) - values[j] @ mz.T
            worst = max(worst, float(np.max(np.abs(residual))))
    logger.debug("forcing_compat_checked", residual=worst, points=grid.shape[0], ok=worst <= tol)
    return worst
