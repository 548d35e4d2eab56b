"""Numerical checks of first integrals: constancy, Lie residuals and independence."""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from firstint.builder.assembly import RANK_TOL, gradient_rows
from firstint.builder.integral import FirstIntegral, TheoremTag, make_integral
from firstint.expr.evaluate import evaluate
from firstint.expr.hyperplanes import Hyperplane, first_event, safe_mask
from firstint.expr.lie import lie_batch
from firstint.expr.nodes import Expr, quadrature_names
from firstint.linalg.elimination import rank
from firstint.systems.sampling import safe_points
from firstint.systems.spec import SystemSpec
from firstint.utils.exceptions import DomainError
from firstint.verify.integrator import TrajectorySample

DEPENDENCE_TOL = 1e-6
NON_FINITE_EVENT = "non-finite value"


@dataclass(frozen=True)
class DriftResult:
    """Drift of an integral along one trajectory, truncated at the first domain event."""

    drift: float
    steps_used: int
    event: str | None = None


def trajectory_drift(integral: FirstIntegral, sample: TrajectorySample) -> DriftResult:
    """
    Relative drift of an integral along a sample, up to its first excluded-set crossing.

    A non-finite value before that crossing makes the drift infinite.

    Raises:
        DomainError: If the starting point lies on an excluded set of the integral
    """
    planes = integral.excluded_hyperplanes
    quad = {name: sample.quad_values[name] for name in quadrature_names(integral.expr)}
    if planes and not bool(
        safe_mask(planes, sample.path[:1], sample.states[:1], 0.0, _head(quad))[0]
    ):
        raise DomainError("Trajectory starts on an excluded set", hyperplane=integral.rendered)
    event = first_event(planes, sample.path, sample.states, quad) if planes else None
    stop = sample.steps if event is None else event[0]
    if stop < 2:
        return DriftResult(0.0, stop, event[1] if event else None)
    values = evaluate(
        integral.expr,
        sample.path[:stop],
        sample.states[:stop],
        {k: v[:stop] for k, v in quad.items()},
    )
    if not np.all(np.isfinite(values)):
        return DriftResult(float("inf"), stop, NON_FINITE_EVENT)
    start = values[0]
    drift = float(np.max(np.abs(values - start))) / (1.0 + abs(start))
    return DriftResult(drift, stop, event[1] if event else None)


def _head(quad: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    return {k: v[:1] for k, v in quad.items()}


def constancy_check(integral: FirstIntegral, sample: TrajectorySample) -> float:
    """
    max_k |F(t_k, x_k) - F(t_0, x_0)| / (1 + |F(t_0, x_0)|) along a trajectory.

    Steps from the first crossing of an excluded set onwards are ignored.

    Raises:
        DomainError: If the start point is excluded
    """
    return trajectory_drift(integral, sample).drift


def lie_residual_check(
    integral: FirstIntegral,
    spec: SystemSpec,
    n_samples: int,
    rng: np.random.Generator,
    box: float = 2.0,
    margin: float = 1e-3,
) -> float:
    """
    Largest scaled Lie derivative of an integral over seeded safe points.

    Args:
        integral: Integral to check
        spec: System
        n_samples: Number of points
        rng: Seeded generator
        box: Sampling box half-width for t and every real state coordinate
        margin: Relative distance to keep from excluded sets

    Returns:
        max over points and directions of |L_j F| / (1 + |F|); infinite as soon as
        one value is not finite

    Raises:
        DomainError: If too few safe points can be drawn
    """
    t, x = safe_points(spec, integral.excluded_hyperplanes, n_samples, rng, box, margin)
    quad, quad_rates = integral.quad_env(t)
    worst = 0.0
    for j in range(spec.directions):
        values, deriv = lie_batch(integral.expr, spec, j, t, x, quad, quad_rates)
        scaled = np.abs(deriv) / (1.0 + np.abs(values))
        if not (np.all(np.isfinite(values)) and np.all(np.isfinite(deriv))):
            return float("inf")
        if scaled.size:
            worst = max(worst, float(scaled.max()))
    return worst


def independence_check(
    integrals: Sequence[FirstIntegral], spec: SystemSpec, t: np.ndarray, x: np.ndarray
) -> int:
    """
    Rank of the Jacobian of a set of integrals at a point.

    Rows are gradients in (t, real state coordinates), normalized per row;
    autonomous integrals have zero t-components so the rank equals the
    state-only rank for autonomous sets.

    Raises:
        DomainError: If the point is excluded for one of the integrals
    """
    if not integrals:
        return 0
    rows = np.vstack([gradient_rows(f, spec, t, x) for f in integrals])
    return rank(rows, RANK_TOL)


@dataclass(frozen=True)
class DependenceResult:
    """Outcome of comparing a reference function with a set of integrals."""

    reference: str
    dependent: bool
    points: int
    failures: int


def functional_dependence(
    integrals: Sequence[FirstIntegral],
    reference: Expr,
    spec: SystemSpec,
    rng: np.random.Generator,
    samples: int = 50,
    box: float = 2.0,
    margin: float = 1e-3,
    tol: float = DEPENDENCE_TOL,
) -> DependenceResult:
    """
    Whether the gradient of a reference function lies in the span of the integrals' gradients.

    At every sample point rank([J_F; grad G]) must equal rank(J_F).

    Args:
        integrals: Constructed integrals F
        reference: Reference function G (an expression without quadratures)
        spec: System
        rng: Seeded generator
        samples: Number of safe points
        box: Sampling box half-width
        margin: Relative distance to keep from excluded sets
        tol: Relative rank tolerance

    Returns:
        DependenceResult counting the points where G is independent of F
    """
    target = make_integral(reference, TheoremTag.PSI_DIRECT, ["reference"], spec)
    planes: dict[str, Hyperplane] = {}
    for f in (*integrals, target):
        for plane in f.excluded_hyperplanes:
            planes.setdefault(f"{plane.kind.value}:{plane.render()}", plane)
    t, x = safe_points(spec, tuple(planes.values()), samples, rng, box, margin)
    failures = 0
    for k in range(samples):
        jf = np.vstack([gradient_rows(f, spec, t[k], x[k]) for f in integrals])
        jg = gradient_rows(target, spec, t[k], x[k])
        if rank(np.vstack([jf, jg]), tol) > rank(jf, tol):
            failures += 1
    return DependenceResult(target.rendered, failures == 0, samples, failures)
