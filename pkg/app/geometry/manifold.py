"""
Beta manifold - Fisher information geometry of B(x, y).

The metric is minus the Hessian of the log-partition
    φ(x, y) = lnΓ(x+y) − lnΓ(x) − lnΓ(y),
so every geometric quantity reduces to ψ′ and ψ″ evaluated at x, y and x+y.
Array kernels (`*_arrays`) take coordinate arrays and are what the geodesic
solver calls; the BetaPoint functions wrap them.
"""

import logging
from dataclasses import dataclass
from typing import List, NamedTuple, Tuple

import numpy as np

from app.core.errors import ArgumentError, NumericalDegeneracyError
from .specfun import _trigamma_tetragamma, log_gamma
from .state import BetaPoint, MetricMatrix, TangentVector

logger = logging.getLogger(__name__)


class PolygammaTerms(NamedTuple):
    """ψ′ and ψ″ at x, y and s = x + y."""
    tx: np.ndarray
    ty: np.ndarray
    ts: np.ndarray
    qx: np.ndarray
    qy: np.ndarray
    qs: np.ndarray


def polygamma_terms(x: np.ndarray, y: np.ndarray) -> PolygammaTerms:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    stacked = np.stack([x, y, x + y])
    d1, d2 = _trigamma_tetragamma(stacked)
    return PolygammaTerms(d1[0], d1[1], d1[2], d2[0], d2[1], d2[2])


def determinant(terms: PolygammaTerms) -> np.ndarray:
    """d(x, y) = ψ′(x)ψ′(y) − ψ′(x+y)(ψ′(x) + ψ′(y))."""
    return terms.tx * terms.ty - terms.ts * (terms.tx + terms.ty)


# ============================================================================
# LOG-PARTITION AND METRIC
# ============================================================================

def log_partition(p: BetaPoint) -> float:
    return log_gamma(p.x + p.y) - log_gamma(p.x) - log_gamma(p.y)


def metric_arrays(x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(gxx, gxy, gyy, det) for coordinate arrays."""
    t = polygamma_terms(x, y)
    return t.tx - t.ts, -t.ts, t.ty - t.ts, determinant(t)


def metric_matrix(p: BetaPoint) -> MetricMatrix:
    gxx, gxy, gyy, det = metric_arrays(p.x, p.y)
    return MetricMatrix(gxx=float(gxx), gxy=float(gxy), gyy=float(gyy), det=float(det))


def inverse_metric(p: BetaPoint) -> np.ndarray:
    g = metric_matrix(p)
    if g.det <= 0:
        raise NumericalDegeneracyError(f"metric determinant {g.det:.3e} <= 0 at {p}")
    return np.array([[g.gyy, -g.gxy], [-g.gxy, g.gxx]]) / g.det


def squared_norm_arrays(points: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """g_p(w, w) row by row for (N, 2) points and vectors."""
    gxx, gxy, gyy, _ = metric_arrays(points[:, 0], points[:, 1])
    u, v = vectors[:, 0], vectors[:, 1]
    return gxx * u * u + 2.0 * gxy * u * v + gyy * v * v


def inner(vec1: TangentVector, vec2: TangentVector) -> float:
    if vec1.base != vec2.base:
        raise ArgumentError(f"inner product of vectors at different base points: {vec1.base} vs {vec2.base}")
    g = metric_matrix(vec1.base)
    return (
        g.gxx * vec1.u * vec2.u
        + g.gxy * (vec1.u * vec2.v + vec1.v * vec2.u)
        + g.gyy * vec1.v * vec2.v
    )


def norm(vec: TangentVector) -> float:
    return float(np.sqrt(max(inner(vec, vec), 0.0)))


# ============================================================================
# CHRISTOFFEL COEFFICIENTS
# ============================================================================

@dataclass(frozen=True)
class ChristoffelCoefficients:
    """Coefficients of  ẍ + aẋ² + bẋẏ + cẏ² = 0  and  ÿ + a′ẏ² + b′ẋẏ + c′ẋ² = 0."""
    x_equation: Tuple[float, float, float]   # a(x,y), b(x,y), c(x,y)
    y_equation: Tuple[float, float, float]   # a(y,x), b(y,x), c(y,x)
    det: float


def _abc(t_self, t_other, t_sum, q_self, q_other, q_sum, d):
    # rows with d == 0 come out inf/nan; callers check d
    with np.errstate(divide="ignore", invalid="ignore"):
        a = (q_self * t_other - q_self * t_sum - t_other * q_sum) / (2.0 * d)
        b = -(q_sum * t_other) / d
        c = (q_other * t_sum - t_other * q_sum) / (2.0 * d)
    return a, b, c


def christoffel_arrays(x: np.ndarray, y: np.ndarray):
    """((a, b, c), (a′, b′, c′), d) for coordinate arrays. The y-triple is the
    x-triple with the arguments swapped, evaluated by the same code path."""
    t = polygamma_terms(x, y)
    d = determinant(t)
    x_eq = _abc(t.tx, t.ty, t.ts, t.qx, t.qy, t.qs, d)
    y_eq = _abc(t.ty, t.tx, t.ts, t.qy, t.qx, t.qs, d)
    return x_eq, y_eq, d


def christoffel_coefficients(p: BetaPoint) -> ChristoffelCoefficients:
    x_eq, y_eq, d = christoffel_arrays(p.x, p.y)
    if not d > 0:
        raise NumericalDegeneracyError(f"metric determinant {float(d):.3e} <= 0 at {p}")
    return ChristoffelCoefficients(
        x_equation=tuple(float(c) for c in x_eq),
        y_equation=tuple(float(c) for c in y_eq),
        det=float(d),
    )


def geodesic_acceleration(positions: np.ndarray, velocities: np.ndarray) -> np.ndarray:
    """(ẍ, ÿ) of the geodesic equation for (N, 2) positions and velocities."""
    (a, b, c), (a2, b2, c2), _ = christoffel_arrays(positions[:, 0], positions[:, 1])
    u = velocities[:, 0]
    v = velocities[:, 1]
    uv = u * v
    ax = -(a * (u * u) + b * uv + c * (v * v))
    ay = -(a2 * (v * v) + b2 * uv + c2 * (u * u))
    return np.stack([ax, ay], axis=1)


# ============================================================================
# SECTIONAL CURVATURE
# ============================================================================

def curvature_arrays(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """K = ψ″(x)ψ″(y)ψ″(x+y)·(F(x) + F(y) − F(x+y)) / (4d²),  F = ψ′/ψ″."""
    t = polygamma_terms(x, y)
    d = determinant(t)
    subadditivity_gap = t.tx / t.qx + t.ty / t.qy - t.ts / t.qs
    return t.qx * t.qy * t.qs * subadditivity_gap / (4.0 * d * d)


def sectional_curvature(p: BetaPoint) -> float:
    return float(curvature_arrays(p.x, p.y))


class CurvatureRow(NamedTuple):
    x: float
    y: float
    K: float


def curvature_grid(xmin: float, xmax: float, ymin: float, ymax: float, n: int) -> List[CurvatureRow]:
    """K on an n×n log-spaced grid, x-major order."""
    if not (0 < xmin < xmax) or not (0 < ymin < ymax):
        raise ArgumentError(
            f"curvature grid needs 0 < xmin < xmax and 0 < ymin < ymax, "
            f"got x=[{xmin}, {xmax}] y=[{ymin}, {ymax}]"
        )
    if n < 2:
        raise ArgumentError(f"curvature grid needs n >= 2, got {n}")

    xs = np.geomspace(xmin, xmax, n)
    ys = np.geomspace(ymin, ymax, n)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    K = curvature_arrays(gx.ravel(), gy.ravel())
    logger.debug("--- CURVATURE: %d nodes, max K=%.3e ---", K.size, float(K.max()))
    return [CurvatureRow(float(a), float(b), float(k)) for a, b, k in zip(gx.ravel(), gy.ravel(), K)]
