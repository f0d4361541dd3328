"""
Geodesics of the beta manifold: exponential map (IVP), logarithm map (BVP by
shooting), geodesic distance, geodesic balls.

Everything runs on stacked (N, 2) arrays so that distance matrices and
Karcher iterations solve all their geodesic problems in one pass. Rows never
interact: a row's result is the same whatever else is in the batch.
"""

import logging
from dataclasses import dataclass
from typing import List, NamedTuple, Optional

import numpy as np

from app.core.config import get_settings
from app.core.errors import ArgumentError, BoundaryEscapeError, ConvergenceError
from .manifold import geodesic_acceleration, metric_arrays, squared_norm_arrays
from .state import BetaPoint, GeodesicPath, TangentVector

logger = logging.getLogger(__name__)

MAX_HALVINGS = 30


@dataclass(frozen=True)
class SolverOptions:
    steps: int
    boundary_guard: float
    max_iterations: int
    tolerance: float
    fd_step: float

    @classmethod
    def from_settings(cls, steps: Optional[int] = None, **overrides) -> "SolverOptions":
        settings = get_settings()
        values = {
            "steps": steps if steps is not None else settings.ivp_steps,
            "boundary_guard": settings.boundary_guard,
            "max_iterations": settings.shooting_max_iterations,
            "tolerance": settings.shooting_tolerance,
            "fd_step": settings.shooting_fd_step,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        if values["steps"] <= 0:
            raise ArgumentError(f"steps must be a positive integer, got {values['steps']}")
        return cls(**values)


class Integration(NamedTuple):
    positions: np.ndarray        # (N, 2) final (or last valid) positions
    velocities: np.ndarray       # (N, 2)
    alive: np.ndarray            # (N,) False where the path left the quadrant
    escape_step: np.ndarray      # (N,) step index of the escape, -1 if none
    trajectory: Optional[np.ndarray]  # (steps+1, N, 4) when recorded


# ============================================================================
# INITIAL VALUE PROBLEM (RK4)
# ============================================================================

def integrate(
    positions: np.ndarray,
    velocities: np.ndarray,
    steps: int,
    boundary_guard: float,
    record: bool = False,
) -> Integration:
    """Classical fixed-step RK4 on the geodesic system over t in [0, 1].

    Rows whose step lands below `boundary_guard` are frozen at their last
    valid state and flagged in `alive`.
    """
    pos = np.array(positions, dtype=float, copy=True).reshape(-1, 2)
    vel = np.array(velocities, dtype=float, copy=True).reshape(-1, 2)
    n = pos.shape[0]
    h = 1.0 / steps
    half = 0.5 * h

    alive = np.ones(n, dtype=bool)
    escape_step = np.full(n, -1, dtype=int)
    trajectory = None
    if record:
        trajectory = np.empty((steps + 1, n, 4))
        trajectory[0, :, :2] = pos
        trajectory[0, :, 2:] = vel

    def accel(p, w):
        # stage points may dip under the guard before the step is rejected
        return geodesic_acceleration(np.maximum(p, boundary_guard), w)

    for i in range(steps):
        k1x = vel
        k1v = accel(pos, vel)
        k2x = vel + half * k1v
        k2v = accel(pos + half * k1x, k2x)
        k3x = vel + half * k2v
        k3v = accel(pos + half * k2x, k3x)
        k4x = vel + h * k3v
        k4v = accel(pos + h * k3x, k4x)

        new_pos = pos + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        new_vel = vel + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)

        valid = np.all(np.isfinite(new_pos), axis=1) & np.all(np.isfinite(new_vel), axis=1)
        valid &= new_pos.min(axis=1) >= boundary_guard
        escaped_now = alive & ~valid
        escape_step[escaped_now] = i
        alive &= valid

        keep = alive[:, None]
        pos = np.where(keep, new_pos, pos)
        vel = np.where(keep, new_vel, vel)

        if record:
            trajectory[i + 1, :, :2] = pos
            trajectory[i + 1, :, 2:] = vel

    return Integration(pos, vel, alive, escape_step, trajectory)


def exp_batch(points: np.ndarray, vectors: np.ndarray, options: Optional[SolverOptions] = None) -> np.ndarray:
    """Row-wise exp_p(w); raises BoundaryEscapeError on the first escaped row."""
    options = options or SolverOptions.from_settings()
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    result = integrate(points, vectors, options.steps, options.boundary_guard)
    if not result.alive.all():
        row = int(np.flatnonzero(~result.alive)[0])
        state = np.concatenate([result.positions[row], result.velocities[row]])
        raise BoundaryEscapeError(
            f"geodesic from {tuple(points[row])} left the parameter domain",
            last_state=tuple(state),
            time=result.escape_step[row] / options.steps,
        )
    return result.positions


def geodesic_ivp(start: BetaPoint, velocity: TangentVector, steps: Optional[int] = None) -> GeodesicPath:
    if velocity.base != start:
        raise ArgumentError(f"velocity is attached to {velocity.base}, not to the start point {start}")
    options = SolverOptions.from_settings(steps)

    result = integrate(
        start.as_array()[None, :], velocity.as_array()[None, :],
        options.steps, options.boundary_guard, record=True,
    )
    if not result.alive[0]:
        state = np.concatenate([result.positions[0], result.velocities[0]])
        raise BoundaryEscapeError(
            f"geodesic from {start} with velocity ({velocity.u}, {velocity.v}) left the parameter domain",
            last_state=tuple(state),
            time=result.escape_step[0] / options.steps,
        )
    return _path_from_trajectory(result.trajectory[:, 0, :], options.steps)


def _path_from_trajectory(traj: np.ndarray, steps: int) -> GeodesicPath:
    times = np.linspace(0.0, 1.0, steps + 1)
    speeds = squared_norm_arrays(traj[:, :2], traj[:, 2:])
    return GeodesicPath(
        times=times,
        points=[BetaPoint(float(r[0]), float(r[1])) for r in traj],
        velocities=[(float(r[2]), float(r[3])) for r in traj],
        speeds=speeds,
    )


def exp_map(start: BetaPoint, velocity: TangentVector) -> BetaPoint:
    if velocity.base != start:
        raise ArgumentError(f"velocity is attached to {velocity.base}, not to the start point {start}")
    end = exp_batch(start.as_array()[None, :], velocity.as_array()[None, :])
    return BetaPoint(float(end[0, 0]), float(end[0, 1]))


# ============================================================================
# BOUNDARY VALUE PROBLEM (SHOOTING)
# ============================================================================

def initial_guess(starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
    """Euclidean difference rescaled to the metric length estimated at the midpoint."""
    delta = ends - starts
    at_start = squared_norm_arrays(starts, delta)
    at_mid = squared_norm_arrays(0.5 * (starts + ends), delta)
    scale = np.ones(len(delta))
    nonzero = at_start > 0
    scale[nonzero] = np.sqrt(at_mid[nonzero] / at_start[nonzero])
    return delta * scale[:, None]


def _solve_2x2(J: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    a, b = J[:, 0, 0], J[:, 0, 1]
    c, d = J[:, 1, 0], J[:, 1, 1]
    det = a * d - b * c
    with np.errstate(divide="ignore", invalid="ignore"):
        sx = (d * rhs[:, 0] - b * rhs[:, 1]) / det
        sy = (a * rhs[:, 1] - c * rhs[:, 0]) / det
    return np.stack([sx, sy], axis=1)


def log_batch(starts: np.ndarray, ends: np.ndarray, options: Optional[SolverOptions] = None) -> np.ndarray:
    """Row-wise log_p(q) by Newton shooting on the initial velocity.

    The Jacobian of v ↦ exp_p(v) is taken by forward differences; a step that
    does not decrease the endpoint residual (or escapes the domain) is halved.
    Raises ConvergenceError when any row misses the tolerance.
    """
    options = options or SolverOptions.from_settings()
    starts = np.asarray(starts, dtype=float).reshape(-1, 2)
    ends = np.asarray(ends, dtype=float).reshape(-1, 2)
    if starts.shape != ends.shape:
        raise ArgumentError(f"log_batch: {starts.shape[0]} start points for {ends.shape[0]} end points")
    n = starts.shape[0]
    if n == 0:
        return np.zeros((0, 2))

    steps, guard, tol = options.steps, options.boundary_guard, options.tolerance

    velocity = initial_guess(starts, ends)
    same = np.all(starts == ends, axis=1)
    velocity[same] = 0.0

    shot = integrate(starts, velocity, steps, guard)
    endpoint = shot.positions
    residual = np.where(shot.alive, np.linalg.norm(endpoint - ends, axis=1), np.inf)
    residual[same] = 0.0
    stalled = np.zeros(n, dtype=bool)

    iterations = 0
    for iterations in range(1, options.max_iterations + 1):
        active = np.flatnonzero((residual > tol) & ~stalled)
        if active.size == 0:
            break

        # A guess that escapes the domain is pulled back toward zero first
        lost = active[~np.isfinite(residual[active])]
        if lost.size:
            velocity[lost] *= 0.5
            retry = integrate(starts[lost], velocity[lost], steps, guard)
            endpoint[lost] = retry.positions
            residual[lost] = np.where(
                retry.alive, np.linalg.norm(retry.positions - ends[lost], axis=1), np.inf
            )
            active = active[~np.isin(active, lost)]
            if active.size == 0:
                continue

        p_act = starts[active]
        v_act = velocity[active]
        e_act = endpoint[active]
        r_act = e_act - ends[active]

        h = options.fd_step * np.maximum(1.0, np.linalg.norm(v_act, axis=1))
        perturbed = np.concatenate([v_act + np.stack([h, np.zeros_like(h)], axis=1),
                                    v_act + np.stack([np.zeros_like(h), h], axis=1)])
        fd = integrate(np.concatenate([p_act, p_act]), perturbed, steps, guard)
        m = active.size
        J = np.empty((m, 2, 2))
        J[:, :, 0] = (fd.positions[:m] - e_act) / h[:, None]
        J[:, :, 1] = (fd.positions[m:] - e_act) / h[:, None]
        newton = _solve_2x2(J, -r_act)
        bad_step = ~np.all(np.isfinite(newton), axis=1)
        newton[bad_step] = -r_act[bad_step]  # singular Jacobian: fall back to a residual step

        # Damped update: halve until the residual decreases
        step = np.ones(m)
        pending = np.ones(m, dtype=bool)
        for _ in range(MAX_HALVINGS):
            idx = np.flatnonzero(pending)
            candidate = v_act[idx] + step[idx, None] * newton[idx]
            trial = integrate(p_act[idx], candidate, steps, guard)
            trial_res = np.linalg.norm(trial.positions - ends[active[idx]], axis=1)
            ok = trial.alive & (trial_res < residual[active[idx]])
            rows = active[idx[ok]]
            velocity[rows] = candidate[ok]
            endpoint[rows] = trial.positions[ok]
            residual[rows] = trial_res[ok]
            pending[idx[ok]] = False
            step[idx[~ok]] *= 0.5
            if not pending.any():
                break
        stalled[active[pending]] = True

    failed = residual > tol
    if failed.any():
        worst = float(np.max(residual[failed]))
        logger.warning("--- SHOOTING: %d/%d problems did not converge (worst residual %.3e) ---",
                       int(failed.sum()), n, worst)
        raise ConvergenceError("logarithm map (shooting) did not converge", residual=worst, iterations=iterations)

    logger.debug("--- SHOOTING: %d problems solved in %d iterations ---", n, iterations)
    return velocity


def log_map(start: BetaPoint, end: BetaPoint) -> TangentVector:
    w = log_batch(start.as_array()[None, :], end.as_array()[None, :])[0]
    return TangentVector(start, float(w[0]), float(w[1]))


# ============================================================================
# DISTANCE
# ============================================================================

def distance_batch(starts: np.ndarray, ends: np.ndarray, options: Optional[SolverOptions] = None) -> np.ndarray:
    """Row-wise Fisher–Rao distance: metric norm of the logarithm."""
    starts = np.asarray(starts, dtype=float).reshape(-1, 2)
    w = log_batch(starts, ends, options)
    return np.sqrt(np.maximum(squared_norm_arrays(starts, w), 0.0))


def distance(p: BetaPoint, q: BetaPoint) -> float:
    return float(distance_batch(p.as_array()[None, :], q.as_array()[None, :])[0])


def pairwise_distances(
    A: np.ndarray,
    B: Optional[np.ndarray] = None,
    options: Optional[SolverOptions] = None,
) -> np.ndarray:
    """|A|×|B| distance matrix; with B omitted only the upper triangle of A×A is solved."""
    A = np.asarray(A, dtype=float).reshape(-1, 2)
    if B is None:
        n = A.shape[0]
        out = np.zeros((n, n))
        i, j = np.triu_indices(n, k=1)
        if i.size:
            d = distance_batch(A[i], A[j], options)
            out[i, j] = d
            out[j, i] = d
        return out

    B = np.asarray(B, dtype=float).reshape(-1, 2)
    ia, ib = np.meshgrid(np.arange(A.shape[0]), np.arange(B.shape[0]), indexing="ij")
    d = distance_batch(A[ia.ravel()], B[ib.ravel()], options)
    return d.reshape(A.shape[0], B.shape[0])


def geodesic_bvp(start: BetaPoint, end: BetaPoint, steps: Optional[int] = None) -> GeodesicPath:
    """Discretized geodesic from `start` to `end`."""
    return geodesic_ivp(start, log_map(start, end), steps)


def path_length(path: GeodesicPath) -> float:
    """Trapezoidal ∫ sqrt(g(γ̇, γ̇)) dt along a discretized path."""
    speeds = np.sqrt(np.maximum(path.speeds, 0.0))
    return float(np.trapz(speeds, path.times))


# ============================================================================
# GEODESIC BALLS
# ============================================================================

class BallPoint(NamedTuple):
    theta: float
    x: float
    y: float
    truncated: bool


def unit_directions(center: BetaPoint, n_directions: int) -> np.ndarray:
    """Unit vectors at `center`, equally spaced in metric angle (eigenbasis of g)."""
    gxx, gxy, gyy, _ = metric_arrays(center.x, center.y)
    G = np.array([[float(gxx), float(gxy)], [float(gxy), float(gyy)]])
    eigvals, eigvecs = np.linalg.eigh(G)
    basis = eigvecs / np.sqrt(eigvals)[None, :]
    theta = 2.0 * np.pi * np.arange(n_directions) / n_directions
    coords = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    return coords @ basis.T


def geodesic_ball(
    center: BetaPoint, radius: float, n_directions: int, steps: Optional[int] = None
) -> List[BallPoint]:
    if radius <= 0:
        raise ArgumentError(f"radius must be > 0, got {radius}")
    if n_directions < 1:
        raise ArgumentError(f"n_directions must be >= 1, got {n_directions}")
    options = SolverOptions.from_settings(steps)

    directions = unit_directions(center, n_directions)
    starts = np.repeat(center.as_array()[None, :], n_directions, axis=0)
    result = integrate(starts, radius * directions, options.steps, options.boundary_guard)
    truncated = int((~result.alive).sum())
    if truncated:
        logger.warning("--- BALL: %d/%d directions left the domain ---", truncated, n_directions)

    theta = 2.0 * np.pi * np.arange(n_directions) / n_directions
    return [
        BallPoint(float(t), float(p[0]), float(p[1]), not bool(ok))
        for t, p, ok in zip(theta, result.positions, result.alive)
    ]
