"""
Maximum-likelihood fit of a beta distribution to samples in [0, 1].

The ML equations are
    ψ(x) − ψ(x+y) = mean(ln t),    ψ(y) − ψ(x+y) = mean(ln(1 − t)).
The per-sample log-likelihood Hessian is minus the Fisher metric, so the
Newton step is Δ = I(x, y)⁻¹ ∇ℓ. It starts from the method-of-moments
estimate and falls back to it (flagged) when Newton fails.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from app.core.config import get_settings
from app.core.errors import ArgumentError, DegenerateSampleError
from app.geometry.manifold import metric_arrays
from app.geometry.specfun import digamma, log_gamma
from app.geometry.state import BetaPoint
from .state import FitResult

logger = logging.getLogger(__name__)

MAX_HALVINGS = 40
NOISE_ULPS = 64
STALL_RATIO = 1e-14


def prepare_samples(samples: Sequence[float]) -> np.ndarray:
    """Validate and move boundary atoms to ε = 1/(2n) and 1 − ε."""
    t = np.asarray(samples, dtype=float).ravel()
    if t.size < 2:
        raise DegenerateSampleError(f"need at least 2 samples, got {t.size}")
    if not np.all(np.isfinite(t)):
        raise ArgumentError("samples contain non-finite values")
    if np.any(t < 0) or np.any(t > 1):
        raise ArgumentError("samples must lie in [0, 1]; normalize them first")

    at_boundary = (t <= 0) | (t >= 1)
    if at_boundary.all():
        raise DegenerateSampleError("all samples sit on the boundary {0, 1}")

    eps = 1.0 / (2.0 * t.size)
    t = np.where(t <= 0, eps, t)
    t = np.where(t >= 1, 1.0 - eps, t)
    if np.unique(t).size < 2:
        raise DegenerateSampleError("fewer than 2 distinct sample values")
    return t


def moments_estimate(t: np.ndarray) -> Tuple[float, float]:
    m = float(np.mean(t))
    v = float(np.var(t))
    common = m * (1.0 - m) / v - 1.0
    return m * common, (1.0 - m) * common


def _mean_log_likelihood(x: float, y: float, l1: float, l2: float) -> float:
    return log_gamma(x + y) - log_gamma(x) - log_gamma(y) + (x - 1.0) * l1 + (y - 1.0) * l2


def _score(x: float, y: float, l1: float, l2: float) -> np.ndarray:
    psi_s = digamma(x + y)
    return np.array([l1 - digamma(x) + psi_s, l2 - digamma(y) + psi_s])


def _objective_noise(x: float, y: float, l1: float, l2: float) -> float:
    """Rounding floor of the log-likelihood, from the magnitudes of its terms."""
    magnitude = (
        abs(log_gamma(x + y)) + abs(log_gamma(x)) + abs(log_gamma(y))
        + abs((x - 1.0) * l1) + abs((y - 1.0) * l2) + 1.0
    )
    return NOISE_ULPS * np.finfo(float).eps * magnitude


def fit_beta_mle(
    samples: Sequence[float],
    max_iterations: Optional[int] = None,
    tolerance: Optional[float] = None,
) -> FitResult:
    settings = get_settings()
    max_iterations = max_iterations or settings.mle_max_iterations
    tolerance = tolerance or settings.mle_tolerance

    t = prepare_samples(samples)
    n = t.size
    l1 = float(np.mean(np.log(t)))
    l2 = float(np.mean(np.log1p(-t)))

    x0, y0 = moments_estimate(t)
    x, y = x0, y0
    objective = _mean_log_likelihood(x, y, l1, l2)
    grad = _score(x, y, l1, l2)
    grad_norm = float(np.linalg.norm(grad))

    iterations = 0
    failed = False
    while grad_norm > tolerance:
        if iterations >= max_iterations:
            failed = True
            break
        iterations += 1

        gxx, gxy, gyy, det = (float(v) for v in metric_arrays(x, y))
        step = np.array([gyy * grad[0] - gxy * grad[1], gxx * grad[1] - gxy * grad[0]]) / det

        # Accept when the likelihood does not drop beyond rounding, or the score shrinks
        noise = _objective_noise(x, y, l1, l2)
        scale = 1.0
        accepted = False
        for _ in range(MAX_HALVINGS):
            nx, ny = x + scale * step[0], y + scale * step[1]
            if nx > 0 and ny > 0:
                cand = _mean_log_likelihood(nx, ny, l1, l2)
                cand_grad = _score(nx, ny, l1, l2)
                cand_norm = float(np.linalg.norm(cand_grad))
                if cand >= objective - noise or cand_norm < grad_norm:
                    accepted = True
                    break
            scale *= 0.5
            if scale * np.linalg.norm(step) <= STALL_RATIO * np.hypot(x, y):
                break

        if not accepted:
            # No representable move improves the fit: stop at the current point
            failed = grad_norm > tolerance
            break

        x, y, objective, grad, grad_norm = nx, ny, cand, cand_grad, cand_norm
        if not np.isfinite(grad_norm):
            failed = True
            break

    if failed:
        logger.warning("--- MLE: Newton failed after %d iterations, using moments estimate ---", iterations)
        return FitResult(
            point=BetaPoint(x0, y0),
            log_likelihood=n * _mean_log_likelihood(x0, y0, l1, l2),
            method="moments-fallback",
            iterations=iterations,
            gradient_norm=float(np.linalg.norm(_score(x0, y0, l1, l2))),
        )

    return FitResult(
        point=BetaPoint(x, y),
        log_likelihood=n * objective,
        method="newton",
        iterations=iterations,
        gradient_norm=grad_norm,
    )
