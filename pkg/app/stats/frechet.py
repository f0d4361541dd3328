"""
Fréchet mean and variance on the beta manifold.

The mean is computed by the Karcher flow
    B̂ ← exp_B̂( (τ/n) Σ log_B̂(Bᵢ) ),
which is a gradient descent on Σ d²(B̂, Bᵢ). The manifold has negative
curvature and is Hadamard, so the minimizer is unique.
"""

import logging
from typing import Optional, Sequence

import numpy as np

from app.core.config import get_settings
from app.core.errors import ArgumentError, BoundaryEscapeError
from app.geometry.geodesic import SolverOptions, distance_batch, exp_batch, log_batch
from app.geometry.manifold import squared_norm_arrays
from app.geometry.state import BetaPoint, points_to_array
from .state import KarcherConfig, MeanResult

logger = logging.getLogger(__name__)

INIT_FLOOR = 1e-6
MIN_STEP = 1e-10
FUNCTIONAL_SLACK = 1e-12


def euclidean_average(points: np.ndarray) -> np.ndarray:
    """Arithmetic mean of the parameters, kept inside the open quadrant."""
    return np.maximum(points.mean(axis=0), INIT_FLOOR)


def _canonical_order(points: np.ndarray) -> np.ndarray:
    order = np.lexsort((points[:, 1], points[:, 0]))
    return points[order]


def _logs_at(mean: np.ndarray, points: np.ndarray, options: Optional[SolverOptions]):
    base = np.repeat(mean[None, :], len(points), axis=0)
    logs = log_batch(base, points, options)
    functional = float(np.sum(squared_norm_arrays(base, logs)))
    return logs, functional


def _gradient_norm(mean: np.ndarray, direction: np.ndarray) -> float:
    return float(np.sqrt(max(squared_norm_arrays(mean[None, :], direction[None, :])[0], 0.0)))


def karcher_flow(
    points: np.ndarray,
    cfg: KarcherConfig,
    init: Optional[np.ndarray] = None,
    options: Optional[SolverOptions] = None,
) -> MeanResult:
    """Array-level Karcher flow; `points` is (N, 2), `init` an optional start."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(points) == 0:
        raise ArgumentError("Fréchet mean of an empty set")
    points = _canonical_order(points)

    mean = euclidean_average(points) if init is None else np.asarray(init, dtype=float).copy()
    tau = cfg.step_size
    if options is None:
        # gradients must be resolved well below the stopping tolerance
        tolerance = min(get_settings().shooting_tolerance, 1e-3 * cfg.gradient_tolerance)
        options = SolverOptions.from_settings(tolerance=tolerance)

    logs, functional = _logs_at(mean, points, options)
    history = [functional]
    gradient = logs.mean(axis=0)
    grad_norm = _gradient_norm(mean, gradient)

    iterations = 0
    while grad_norm > cfg.gradient_tolerance and iterations < cfg.max_iterations:
        iterations += 1
        try:
            candidate = exp_batch(mean[None, :], (tau * gradient)[None, :], options)[0]
            cand_logs, cand_functional = _logs_at(candidate, points, options)
        except BoundaryEscapeError:
            cand_functional = np.inf

        # Damping: a step that increases the functional is retried at half length
        if cand_functional > functional + FUNCTIONAL_SLACK * max(1.0, functional):
            tau *= 0.5
            if tau < MIN_STEP:
                logger.warning("--- KARCHER: step size collapsed at iteration %d ---", iterations)
                break
            continue

        mean, logs, functional = candidate, cand_logs, cand_functional
        history.append(functional)
        gradient = logs.mean(axis=0)
        grad_norm = _gradient_norm(mean, gradient)

    converged = grad_norm <= cfg.gradient_tolerance
    if converged:
        logger.debug("--- KARCHER: converged in %d iterations (grad=%.2e) ---", iterations, grad_norm)
    else:
        logger.warning("--- KARCHER: not converged after %d iterations (grad=%.2e) ---", iterations, grad_norm)

    return MeanResult(
        mean=BetaPoint(float(mean[0]), float(mean[1])),
        iterations_used=iterations,
        final_gradient_norm=grad_norm,
        converged=converged,
        functional_history=history,
    )


def frechet_mean(
    points: Sequence[BetaPoint],
    cfg: Optional[KarcherConfig] = None,
    init: Optional[BetaPoint] = None,
) -> MeanResult:
    """Fréchet mean of a nonempty list of BetaPoints.

    Non-convergence is reported through `converged=False` with the last
    iterate, not raised.
    """
    if len(points) == 0:
        raise ArgumentError("Fréchet mean of an empty set")
    cfg = cfg or KarcherConfig.from_settings()
    start = None if init is None else init.as_array()
    return karcher_flow(points_to_array(points), cfg, init=start)


def frechet_functional(points: Sequence[BetaPoint], candidate: BetaPoint) -> float:
    """Σ d²(candidate, Bᵢ)."""
    arr = points_to_array(points)
    base = np.repeat(candidate.as_array()[None, :], len(arr), axis=0)
    return float(np.sum(distance_batch(base, arr) ** 2))


def frechet_variance(points: Sequence[BetaPoint], mean: BetaPoint) -> float:
    """(1/n) Σ d²(mean, Bᵢ)."""
    if len(points) == 0:
        raise ArgumentError("Fréchet variance of an empty set")
    return frechet_functional(points, mean) / len(points)
