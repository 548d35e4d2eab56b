"""The verification suite over a selected general integral."""

from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from typing import TYPE_CHECKING

import numpy as np

from firstint.builder.integral import FirstIntegral
from firstint.expr.hyperplanes import Hyperplane
from firstint.expr.quadrature import QuadratureSpec
from firstint.systems.frobenius import SolvabilityVerdict
from firstint.systems.sampling import random_points, safe_points
from firstint.systems.spec import SystemKind, SystemSpec
from firstint.utils.exceptions import DomainError, FirstIntegralError
from firstint.utils.logger import get_logger
from firstint.verify.checks import (
    functional_dependence,
    independence_check,
    lie_residual_check,
    trajectory_drift,
)
from firstint.verify.integrator import (
    TrajectorySample,
    integrate_trajectory,
    path_independence_check,
)
from firstint.verify.report import IntegralCheck, ReferenceCheck, VerificationReport

if TYPE_CHECKING:
    from firstint.core.config import AnalysisConfig

logger = get_logger(__name__)


def _union(integrals: Sequence[FirstIntegral]) -> tuple[Hyperplane, ...]:
    planes: dict[str, Hyperplane] = {}
    for f in integrals:
        for plane in f.excluded_hyperplanes:
            planes.setdefault(f"{plane.kind.value}:{plane.render()}", plane)
    return tuple(planes.values())


def _redundant(
    integrals: Sequence[FirstIntegral],
    spec: SystemSpec,
    t: np.ndarray,
    x: np.ndarray,
    full: int,
) -> list[str]:
    # integrals whose removal leaves the Jacobian rank unchanged
    out = []
    for k, f in enumerate(integrals):
        rest = [g for i, g in enumerate(integrals) if i != k]
        if independence_check(rest, spec, t, x) == full:
            out.append(f.rendered)
    return out


def _start_points(
    spec: SystemSpec,
    integrals: Sequence[FirstIntegral],
    config: "AnalysisConfig",
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    # initial states safe for every integral at the anchor, with path directions
    count = config.trajectories
    anchor = np.asarray(config.anchor_for(spec), dtype=float)
    planes = _union(integrals)
    try:
        _, x = safe_points(spec, planes, count, rng, config.box, config.margin)
    except DomainError:
        logger.warning("trajectory_starts_unfiltered", planes=len(planes))
        _, x = random_points(spec, rng, count, config.box)
    directions = rng.normal(size=(count, spec.directions))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    ends = anchor + config.span * directions
    return x, ends


def _trajectories(
    spec: SystemSpec,
    integrals: Sequence[FirstIntegral],
    config: "AnalysisConfig",
    rng: np.random.Generator,
    threads: int,
) -> list[TrajectorySample]:
    if config.trajectories == 0:
        return []
    x0, ends = _start_points(spec, integrals, config, rng)
    anchor = np.asarray(config.anchor_for(spec), dtype=float)
    quads: dict[str, QuadratureSpec] = {}
    for f in integrals:
        for q in f.quadratures:
            quads.setdefault(q.name, q)

    def run(k: int) -> TrajectorySample:
        return integrate_trajectory(
            spec, x0[k], np.vstack([anchor, ends[k]]), config.step, tuple(quads.values())
        )

    workers = threads if threads > 0 else None
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, range(config.trajectories)))


def _check_integral(
    f: FirstIntegral,
    spec: SystemSpec,
    samples: Sequence[TrajectorySample],
    config: "AnalysisConfig",
    rng: np.random.Generator,
) -> IntegralCheck:
    errors: list[str] = []
    residual: float | None = None
    try:
        residual = lie_residual_check(f, spec, config.lie_samples, rng, config.box, config.margin)
    except FirstIntegralError as e:
        errors.append(f"lie residual: {e}")

    drift: float | None = None
    used = 0
    events: list[str] = []
    for sample in samples:
        if sample.overflow:
            continue
        try:
            result = trajectory_drift(f, sample)
        except DomainError as e:
            errors.append(f"trajectory start excluded: {e}")
            continue
        if result.event is not None:
            events.append(result.event)
        drift = result.drift if drift is None else max(drift, result.drift)
        used += 1

    usable = sum(1 for s in samples if not s.overflow)
    if usable and not used:
        errors.append("no trajectory could be checked")
    passed = (
        residual is not None
        and residual <= config.lie_tol
        and (drift is None or drift <= config.drift_tol)
        and (used > 0 or not usable)
    )
    return IntegralCheck(
        expr=f.rendered,
        theorem_tag=f.theorem_tag.value,
        max_lie_residual=residual,
        max_trajectory_drift=drift,
        samples_used=used,
        domain_events=sorted(set(events)),
        errors=errors,
        passed=passed,
    )


def verify_integrals(
    spec: SystemSpec,
    integrals: Sequence[FirstIntegral],
    verdict: SolvabilityVerdict,
    config: "AnalysisConfig",
    threads: int = 0,
) -> VerificationReport:
    """
    Run every numerical check on a set of integrals.

    Trajectories start at the anchor from seeded safe states and follow a
    random unit direction for ``config.span``. They are integrated
    concurrently; all random draws happen beforehand in a fixed order, so
    the report depends only on the system, the configuration and the seed.

    Args:
        spec: System
        integrals: Selected general integral
        verdict: Solvability verdict recorded in the report
        config: Analysis configuration
        threads: Worker threads for trajectories (0 = automatic)

    Returns:
        VerificationReport with per-integral statistics, reference checks,
        independence rank and, for total and R-linear systems, the path gap
    """
    rng = np.random.default_rng(config.seed)
    samples = _trajectories(spec, integrals, config, rng, threads)
    overflowed = sum(1 for s in samples if s.overflow)
    if overflowed:
        logger.warning("trajectories_overflowed", count=overflowed)

    checks = [_check_integral(f, spec, samples, config, rng) for f in integrals]

    independence = 0
    redundant: list[str] = []
    if integrals:
        try:
            t, x = safe_points(spec, _union(integrals), 1, rng, config.box, config.margin)
            independence = independence_check(integrals, spec, t, x)
            redundant = _redundant(integrals, spec, t, x, independence)
        except DomainError as e:
            logger.warning("independence_point_unavailable", error=str(e))

    references: list[ReferenceCheck] = []
    for reference in spec.references:
        if not integrals:
            break
        try:
            result = functional_dependence(
                integrals,
                reference,
                spec,
                rng,
                config.reference_samples,
                config.box,
                config.margin,
            )
        except FirstIntegralError as e:
            logger.warning("reference_check_failed", error=str(e))
            continue
        references.append(ReferenceCheck(**asdict(result)))

    gap: float | None = None
    if spec.kind is not SystemKind.ODE and not spec.is_forced:
        x0 = random_points(spec, rng, 1, config.box)[1][0]
        direction = rng.normal(size=spec.directions)
        target = config.span * direction / np.linalg.norm(direction)
        try:
            gap = path_independence_check(spec, x0, target, config.step)
        except FirstIntegralError as e:
            logger.warning("path_independence_failed", error=str(e))

    gap_ok = gap is None or not verdict.solvable or gap <= config.gap_tol
    passed = (
        all(c.passed for c in checks)
        and all(r.dependent for r in references)
        and gap_ok
        and (not integrals or (independence > 0 and not redundant))
    )
    report = VerificationReport(
        solvability=verdict.to_dict(),
        integrals=checks,
        references=references,
        independence_rank=independence,
        redundant=redundant,
        autonomous_count=sum(1 for f in integrals if f.autonomous),
        path_independence_gap=gap,
        trajectories=len(samples),
        overflowed=overflowed,
        seed=config.seed,
        lie_tol=config.lie_tol,
        drift_tol=config.drift_tol,
        gap_tol=config.gap_tol,
        box=config.box,
        margin=config.margin,
        passed=passed,
    )
    logger.info(
        "verification_completed",
        integrals=len(checks),
        passed=passed,
        independence_rank=independence,
    )
    return report
