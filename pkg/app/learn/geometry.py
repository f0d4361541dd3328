"""
Distance/mean strategies. Learning code only talks to a `Geometry`, so KNN
and K-means run unchanged on the Fisher–Rao manifold or on the flat
parameter plane.
"""

from abc import ABC, abstractmethod
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from app.geometry.geodesic import pairwise_distances
from app.stats.frechet import karcher_flow
from app.stats.state import KarcherConfig
from .state import GeometryChoice


class Geometry(ABC):
    choice: GeometryChoice

    @abstractmethod
    def pairwise(self, A: np.ndarray, B: Optional[np.ndarray] = None) -> np.ndarray:
        """|A|×|B| distance matrix (A×A when B is omitted)."""

    @abstractmethod
    def mean(self, points: np.ndarray, init: Optional[np.ndarray] = None) -> np.ndarray:
        """Barycenter of (N, 2) points, optionally warm-started at `init`."""


class RiemannianGeometry(Geometry):
    choice = GeometryChoice.RIEMANNIAN

    def __init__(self, karcher: Optional[KarcherConfig] = None):
        self.karcher = karcher or KarcherConfig.from_settings()

    def pairwise(self, A, B=None):
        return pairwise_distances(A, B)

    def mean(self, points, init=None):
        result = karcher_flow(np.asarray(points, dtype=float), self.karcher, init=init)
        return result.mean.as_array()


class EuclideanGeometry(Geometry):
    choice = GeometryChoice.EUCLIDEAN

    def pairwise(self, A, B=None):
        A = np.asarray(A, dtype=float).reshape(-1, 2)
        B = A if B is None else np.asarray(B, dtype=float).reshape(-1, 2)
        return cdist(A, B)

    def mean(self, points, init=None):
        return np.asarray(points, dtype=float).reshape(-1, 2).mean(axis=0)


def get_geometry(choice) -> Geometry:
    choice = GeometryChoice(choice)
    if choice is GeometryChoice.RIEMANNIAN:
        return RiemannianGeometry()
    return EuclideanGeometry()
