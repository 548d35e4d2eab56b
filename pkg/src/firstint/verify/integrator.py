"""Fixed-step RK4 integration along polylines in the space of independent variables."""

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from firstint.expr.quadrature import QuadratureSpec
from firstint.systems.rlinear import embed_state
from firstint.systems.spec import SystemKind, SystemSpec
from firstint.utils.exceptions import InputError, NumericalError
from firstint.utils.logger import get_logger
from firstint.utils.validators import validate_positive

logger = get_logger(__name__)

OVERFLOW_NORM = 1e12


@dataclass
class TrajectorySample:
    """
    A numerically integrated solution along a path.

    Attributes:
        path: Times at each recorded step, shape (K, m)
        states: States at each recorded step, shape (K, d)
        quad_values: Accumulator values at each recorded step, by name
        domain_events: Rendered excluded sets crossed (filled by the checks)
        overflow: Integration stopped because the state norm exceeded 1e12
    """

    path: np.ndarray
    states: np.ndarray
    quad_values: dict[str, np.ndarray]
    domain_events: list[str] = field(default_factory=list)
    overflow: bool = False

    @property
    def steps(self) -> int:
        return int(self.states.shape[0])

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def _segment(
    spec: SystemSpec,
    x: np.ndarray,
    start: np.ndarray,
    end: np.ndarray,
    step: float,
    quads: Sequence[QuadratureSpec],
    q: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, bool]:
    length = float(np.linalg.norm(end - start))
    if length == 0.0:
        return start[None, :], x[None, :], q[None, :], False
    count = int(np.ceil(length / step))
    h = length / count
    u = (end - start) / length
    # forcing and integrands are only needed at the half-step grid
    s = np.linspace(0.0, length, 2 * count + 1)
    times = start + s[:, None] * u
    generator = sum(u[j] * spec.direction_matrix(j) for j in range(spec.directions))
    drive = np.zeros((s.size, spec.state_dim), dtype=complex)
    if spec.is_forced:
        for j in range(spec.directions):
            if u[j] != 0:
                drive += u[j] * spec.forcing_values(j, times)
    if quads:
        quad_drive = np.column_stack([qs.rates(times) @ u for qs in quads])
    else:
        quad_drive = np.zeros((s.size, 0), dtype=complex)

    states = [x]
    accum = [q]
    overflow = False
    for k in range(count):
        a, mid, b = 2 * k, 2 * k + 1, 2 * k + 2
        k1 = generator @ x + drive[a]
        k2 = generator @ (x + 0.5 * h * k1) + drive[mid]
        k3 = generator @ (x + 0.5 * h * k2) + drive[mid]
        k4 = generator @ (x + h * k3) + drive[b]
        x = x + h * (k1 + 2.0 * (k2 + k3) + k4) / 6.0
        if spec.kind is SystemKind.RLINEAR:
            n = spec.n
            x = embed_state(0.5 * (x[:n] + np.conj(x[n:])))[0]
        q = q + h * (quad_drive[a] + 4.0 * quad_drive[mid] + quad_drive[b]) / 6.0
        if not np.all(np.isfinite(x)) or float(np.max(np.abs(x))) > OVERFLOW_NORM:
            overflow = True
            break
        states.append(x)
        accum.append(q)
    recorded = len(states)
    return times[: 2 * recorded : 2], np.vstack(states), np.vstack(accum), overflow


def integrate_trajectory(
    spec: SystemSpec,
    x0: np.ndarray,
    path: Sequence[Sequence[float]] | np.ndarray,
    step: float = 1e-3,
    quadratures: Sequence[QuadratureSpec] = (),
) -> TrajectorySample:
    """
    Integrate the system along a polyline of independent-variable values.

    On a segment with unit direction u the state obeys
    dx/ds = sum_j u_j (M_j x + f_j(t)), integrated by classical RK4 with the
    largest step not above ``step`` that divides the segment. Accumulators
    start from their value at the first vertex and are advanced with the same
    stage times. R-linear states are projected back onto (w, conj(w)) after
    every step.

    Args:
        spec: System
        x0: Initial state
        path: Vertices t^0, t^1, ... of the polyline, each of length m (2m for R-linear)
        step: Maximal step length
        quadratures: Accumulators to co-integrate

    Returns:
        TrajectorySample with every step recorded; stops early on overflow

    Raises:
        InputError: On a non-positive step or malformed path
    """
    validate_positive(step, "step")
    vertices = np.atleast_2d(np.asarray(path, dtype=float))
    if vertices.shape[1] != spec.directions:
        raise InputError(
            f"Path points have length {vertices.shape[1]}, expected {spec.directions}"
        )
    x = np.asarray(x0, dtype=complex).copy()
    if x.shape != (spec.state_dim,):
        raise InputError(f"Initial state has shape {x.shape}, expected ({spec.state_dim},)")
    quads = tuple(quadratures)
    q = np.array([qs.values(vertices[:1])[0] for qs in quads], dtype=complex)

    times: list[np.ndarray] = [vertices[:1]]
    states: list[np.ndarray] = [x[None, :]]
    accum: list[np.ndarray] = [q[None, :]]
    overflow = False
    for start, end in zip(vertices[:-1], vertices[1:], strict=True):
        seg_t, seg_x, seg_q, overflow = _segment(spec, x, start, end, step, quads, q)
        times.append(seg_t[1:])
        states.append(seg_x[1:])
        accum.append(seg_q[1:])
        x, q = seg_x[-1], seg_q[-1]
        if overflow:
            logger.debug("trajectory_overflow", steps=sum(len(s) for s in states))
            break

    values = np.vstack(accum)
    return TrajectorySample(
        path=np.vstack(times),
        states=np.vstack(states),
        quad_values={qs.name: values[:, i] for i, qs in enumerate(quads)},
        overflow=overflow,
    )


def axis_path(target: Sequence[float]) -> np.ndarray:
    """Polyline from 0 to target moving along one coordinate axis at a time."""
    target = np.asarray(target, dtype=float)
    vertices = [np.zeros_like(target)]
    for j in range(target.size):
        nxt = vertices[-1].copy()
        nxt[j] = target[j]
        vertices.append(nxt)
    return np.vstack(vertices)


def path_independence_check(
    spec: SystemSpec, x0: np.ndarray, t_target: Sequence[float], step: float = 1e-3
) -> float:
    """
    Endpoint gap between the axis polyline and the straight segment from 0 to t_target.

    Returns:
        ||x_a - x_b||_inf / (1 + ||x_a||_inf); zero for t_target = 0

    Raises:
        InputError: For ordinary systems
        NumericalError: If either integration overflows
    """
    if spec.kind is SystemKind.ODE:
        raise InputError("Path independence applies to total and R-linear systems")
    target = np.asarray(t_target, dtype=float)
    if not np.any(target):
        return 0.0
    along_axes = integrate_trajectory(spec, x0, axis_path(target), step)
    straight = integrate_trajectory(spec, x0, np.vstack([np.zeros_like(target), target]), step)
    if along_axes.overflow or straight.overflow:
        raise NumericalError("Trajectory overflow during the path independence check")
    xa, xb = along_axes.final_state, straight.final_state
    gap = float(np.max(np.abs(xa - xb))) / (1.0 + float(np.max(np.abs(xa))))
    logger.debug("path_independence_checked", gap=gap)
    return gap
