"""
Geometry State - value types of the beta manifold.

Points and tangent vectors are small frozen dataclasses; array-level code
works on (N, 2) numpy arrays and converts at the API boundary.
"""

import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from app.core.errors import ArgumentError, DomainError


# ============================================================================
# POINTS AND VECTORS
# ============================================================================

@dataclass(frozen=True)
class BetaPoint:
    """Beta distribution B(x, y); both shape parameters strictly positive."""
    x: float
    y: float

    def __post_init__(self):
        for name in ("x", "y"):
            value = getattr(self, name)
            if not isinstance(value, (int, float, np.floating, np.integer)):
                raise DomainError(f"BetaPoint.{name} must be a real number, got {type(value).__name__}")
            if not math.isfinite(value) or value <= 0:
                raise DomainError(f"BetaPoint.{name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, name, float(value))

    @classmethod
    def from_array(cls, row: Sequence[float]) -> "BetaPoint":
        return cls(float(row[0]), float(row[1]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])

    def swapped(self) -> "BetaPoint":
        return BetaPoint(self.y, self.x)

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y}


@dataclass(frozen=True)
class TangentVector:
    """Vector (u, v) attached to `base`."""
    base: BetaPoint
    u: float
    v: float

    def __post_init__(self):
        if not isinstance(self.base, BetaPoint):
            raise ArgumentError("TangentVector.base must be a BetaPoint")
        for name in ("u", "v"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ArgumentError(f"TangentVector.{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

    @classmethod
    def zero(cls, base: BetaPoint) -> "TangentVector":
        return cls(base, 0.0, 0.0)

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.v])

    def scaled(self, factor: float) -> "TangentVector":
        return TangentVector(self.base, self.u * factor, self.v * factor)


@dataclass(frozen=True)
class MetricMatrix:
    """Fisher information matrix [[gxx, gxy], [gxy, gyy]] and its determinant."""
    gxx: float
    gxy: float
    gyy: float
    det: float

    def as_array(self) -> np.ndarray:
        return np.array([[self.gxx, self.gxy], [self.gxy, self.gyy]])


# ============================================================================
# DISCRETIZED GEODESICS
# ============================================================================

@dataclass
class GeodesicPath:
    """Geodesic sampled on a time grid of [0, 1]."""
    times: np.ndarray                      # (n,)
    points: List[BetaPoint]
    velocities: List[Tuple[float, float]]
    speeds: np.ndarray = field(default_factory=lambda: np.zeros(0))  # g(γ̇, γ̇) per node

    def __post_init__(self):
        n = len(self.times)
        if len(self.points) != n or len(self.velocities) != n:
            raise ArgumentError("GeodesicPath: times, points and velocities must have the same length")

    @property
    def start(self) -> BetaPoint:
        return self.points[0]

    @property
    def end(self) -> BetaPoint:
        return self.points[-1]

    def max_speed_deviation(self) -> float:
        """Largest relative deviation of g(γ̇, γ̇) from its initial value."""
        if len(self.speeds) == 0 or self.speeds[0] == 0:
            return float(np.max(np.abs(self.speeds))) if len(self.speeds) else 0.0
        return float(np.max(np.abs(self.speeds - self.speeds[0])) / self.speeds[0])

    def rows(self) -> List[Tuple[float, float, float, float, float]]:
        """(t, x, y, u, v) rows."""
        return [
            (float(t), p.x, p.y, float(vel[0]), float(vel[1]))
            for t, p, vel in zip(self.times, self.points, self.velocities)
        ]


def points_to_array(points: Sequence[BetaPoint]) -> np.ndarray:
    """Stack BetaPoints into an (N, 2) array."""
    if len(points) == 0:
        return np.zeros((0, 2))
    return np.array([[p.x, p.y] for p in points], dtype=float)


def array_to_points(arr: np.ndarray) -> List[BetaPoint]:
    return [BetaPoint(float(row[0]), float(row[1])) for row in np.asarray(arr, dtype=float)]
