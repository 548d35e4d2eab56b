"""Selection of a functionally independent set of integrals."""

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from firstint.builder.integral import FirstIntegral
from firstint.expr.evaluate import evaluate_dual
from firstint.expr.hyperplanes import Hyperplane
from firstint.linalg.elimination import rank
from firstint.systems.sampling import random_points, safe_points, state_directions
from firstint.systems.spec import SystemKind, SystemSpec
from firstint.utils.exceptions import DomainError
from firstint.utils.logger import get_logger

logger = get_logger(__name__)

RANK_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class GeneralIntegral:
    """
    The selected integrals with achieved and targeted ranks.

    Attributes:
        integrals: Selected integrals, autonomous first
        autonomous_rank: Jacobian rank of the autonomous part
        total_rank: Jacobian rank of the whole selection
        autonomous_target: Wanted autonomous rank
        total_target: Wanted total rank
        notes: Shortfalls and skipped candidates
    """

    integrals: tuple[FirstIntegral, ...]
    autonomous_rank: int
    total_rank: int
    autonomous_target: int
    total_target: int
    notes: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict[str, Any]:
        return {
            "autonomous_rank": self.autonomous_rank,
            "total_rank": self.total_rank,
            "autonomous_target": self.autonomous_target,
            "total_target": self.total_target,
            "notes": list(self.notes),
        }


def targets(spec: SystemSpec) -> tuple[int, int]:
    """
    (autonomous, total) ranks a general integral reaches.

    Counts are in real functions: an R-linear system has 2(n - m) autonomous
    and 2n total. Forced systems have no autonomous target.
    """
    match spec.kind:
        case SystemKind.RLINEAR:
            autonomous, total = 2 * (spec.n - spec.m), 2 * spec.n
        case SystemKind.TOTAL:
            autonomous, total = spec.n - spec.m, spec.n
        case _:
            autonomous, total = spec.n - 1, spec.n
    return (0 if spec.is_forced else max(autonomous, 0)), total


def gradient_rows(
    integral: FirstIntegral, spec: SystemSpec, t: np.ndarray, x: np.ndarray
) -> np.ndarray:
    """
    Normalized gradient rows of an integral in (t, real state coordinates).

    R-linear integrals are complex valued and give two rows, the gradients
    of their real and imaginary parts.

    Raises:
        DomainError: If the point is excluded for the integral
    """
    t = np.atleast_2d(t)
    x = np.atleast_2d(x)
    quad, quad_rates = integral.quad_env(t)
    zero_t = np.zeros(spec.directions)
    zero_x = np.zeros(spec.state_dim, dtype=complex)
    grads = []
    for j in range(spec.directions):
        dt = zero_t.copy()
        dt[j] = 1.0
        grads.append(evaluate_dual(integral.expr, t, x, dt, zero_x, quad, quad_rates)[1][0])
    for direction in state_directions(spec):
        grads.append(evaluate_dual(integral.expr, t, x, zero_t, direction, quad, quad_rates)[1][0])
    row = np.array(grads, dtype=complex)
    rows = [row.real, row.imag] if spec.kind is SystemKind.RLINEAR else [row]
    out = []
    for r in rows:
        norm = float(np.max(np.abs(r), initial=0.0))
        out.append(r / norm if norm > 0 else r)
    return np.vstack(out).astype(complex)


def _test_point(
    integrals: Sequence[FirstIntegral],
    spec: SystemSpec,
    rng: np.random.Generator,
    box: float,
    margin: float,
    notes: list[str],
) -> tuple[np.ndarray, np.ndarray]:
    planes: dict[str, Hyperplane] = {}
    for f in integrals:
        for plane in f.excluded_hyperplanes:
            planes.setdefault(f"{plane.kind.value}:{plane.render()}", plane)
    try:
        return safe_points(spec, tuple(planes.values()), 1, rng, box, margin)
    except DomainError:
        notes.append("no point avoids every excluded set; candidates failing there are skipped")
        return random_points(spec, rng, 1, box)


def assemble_general_integral(
    integrals: Sequence[FirstIntegral],
    spec: SystemSpec,
    rng: np.random.Generator,
    box: float = 2.0,
    margin: float = 1e-3,
) -> GeneralIntegral:
    """
    Greedy selection of a functionally independent set.

    Candidates are ordered by construction family priority, then by their
    position in the pool. Autonomous integrals are taken first until the
    autonomous target rank is reached; the selection is then topped up to the
    total target. A candidate is kept only when it raises the Jacobian rank at
    a seeded safe point.

    Args:
        integrals: Candidate pool
        spec: System
        rng: Seeded generator for the test point
        box: Sampling box half-width
        margin: Relative distance to keep from excluded sets

    Returns:
        GeneralIntegral; a shortfall below target is noted, not raised
    """
    autonomous_target, total_target = targets(spec)
    notes: list[str] = []
    if not integrals:
        notes.append("no candidate integrals")
        return GeneralIntegral((), 0, 0, autonomous_target, total_target, tuple(notes))

    t, x = _test_point(integrals, spec, rng, box, margin, notes)
    ordered = sorted(enumerate(integrals), key=lambda p: (p[1].theorem_tag.priority, p[0]))
    rows: dict[int, np.ndarray] = {}
    for idx, f in ordered:
        try:
            rows[idx] = gradient_rows(f, spec, t, x)
        except DomainError as e:
            notes.append(f"candidate {f.rendered} skipped: {e}")

    selected: list[int] = []
    current = np.zeros((0, spec.directions + len(state_directions(spec))), dtype=complex)
    achieved = 0

    def take(idx: int) -> None:
        nonlocal current, achieved
        stacked = np.vstack([current, rows[idx]])
        r = rank(stacked, RANK_TOL)
        if r > achieved:
            current, achieved = stacked, r
            selected.append(idx)

    for idx, f in ordered:
        if achieved >= autonomous_target:
            break
        if f.autonomous and idx in rows:
            take(idx)
    autonomous_rank = achieved
    for idx, _ in ordered:
        if achieved >= total_target:
            break
        if idx in rows and idx not in selected:
            take(idx)

    if autonomous_rank < autonomous_target:
        notes.append(f"autonomous rank {autonomous_rank} below target {autonomous_target}")
    if achieved < total_target:
        notes.append(f"total rank {achieved} below target {total_target}")
    for note in notes:
        logger.warning("assembly_note", note=note)
    chosen = sorted(selected, key=lambda i: (not integrals[i].autonomous, selected.index(i)))
    logger.info(
        "general_integral_assembled",
        selected=len(chosen),
        autonomous_rank=autonomous_rank,
        total_rank=achieved,
    )
    return GeneralIntegral(
        integrals=tuple(integrals[i] for i in chosen),
        autonomous_rank=autonomous_rank,
        total_rank=achieved,
        autonomous_target=autonomous_target,
        total_target=total_target,
        notes=tuple(notes),
    )
