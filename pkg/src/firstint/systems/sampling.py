"""Seeded sampling of evaluation points away from excluded sets."""

from collections.abc import Sequence

import numpy as np

from firstint.expr.hyperplanes import Hyperplane, safe_mask
from firstint.systems.rlinear import embed_state
from firstint.systems.spec import SystemKind, SystemSpec
from firstint.utils.exceptions import DomainError

# candidates drawn per requested point before giving up
REJECTION_FACTOR = 100


def random_points(
    spec: SystemSpec, rng: np.random.Generator, count: int, box: float = 2.0
) -> tuple[np.ndarray, np.ndarray]:
    """
    Uniform points in [-box, box] for every real coordinate.

    R-linear states are drawn as complex w and embedded as (w, conj(w)).

    Returns:
        (t, x) with shapes (count, directions) and (count, state_dim)
    """
    t = rng.uniform(-box, box, size=(count, spec.directions))
    if spec.kind is SystemKind.RLINEAR:
        w = rng.uniform(-box, box, size=(count, spec.n)) + 1j * rng.uniform(
            -box, box, size=(count, spec.n)
        )
        return t, embed_state(w)
    return t, rng.uniform(-box, box, size=(count, spec.n)).astype(complex)


def safe_points(
    spec: SystemSpec,
    hyperplanes: Sequence[Hyperplane],
    count: int,
    rng: np.random.Generator,
    box: float = 2.0,
    margin: float = 1e-3,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Rejection-sample points at distance > margin * scale from every hyperplane.

    Args:
        spec: System fixing the dimensions
        hyperplanes: Excluded sets to avoid
        count: Number of points wanted
        rng: Seeded generator
        box: Half-width of the sampling box
        margin: Relative distance to keep from the excluded sets

    Returns:
        (t, x) batches of exactly count points

    Raises:
        DomainError: If fewer than count points survive REJECTION_FACTOR * count draws
    """
    planes = tuple(hyperplanes)
    kept_t: list[np.ndarray] = []
    kept_x: list[np.ndarray] = []
    have = 0
    budget = REJECTION_FACTOR * count
    while have < count and budget > 0:
        batch = min(max(2 * (count - have), 16), budget)
        budget -= batch
        t, x = random_points(spec, rng, batch, box)
        mask = safe_mask(planes, t, x, margin) if planes else np.ones(batch, dtype=bool)
        kept_t.append(t[mask])
        kept_x.append(x[mask])
        have += int(mask.sum())
    if have < count:
        forms = ", ".join(p.render() for p in planes)
        raise DomainError(
            f"Only {have} of {count} sample points avoid the excluded sets", hyperplane=forms
        )
    return np.vstack(kept_t)[:count], np.vstack(kept_x)[:count]


def state_directions(spec: SystemSpec) -> list[np.ndarray]:
    """
    Tangent vectors of the real state coordinates.

    For R-linear systems these are d/dRe w_i = e_i + e_(n+i) and
    d/dIm w_i = i e_i - i e_(n+i) on gamma; otherwise the unit vectors.
    """
    d = spec.state_dim
    if spec.kind is not SystemKind.RLINEAR:
        return [np.eye(d, dtype=complex)[i] for i in range(d)]
    n = spec.n
    out = []
    for i in range(n):
        v = np.zeros(d, dtype=complex)
        v[i], v[n + i] = 1.0, 1.0
        out.append(v)
    for i in range(n):
        v = np.zeros(d, dtype=complex)
        v[i], v[n + i] = 1j, -1j
        out.append(v)
    return out
