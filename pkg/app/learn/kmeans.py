"""
K-means on the beta manifold.

Supervised K-means is nearest-class-centroid classification. Unsupervised
K-means is Lloyd's algorithm with distance and mean supplied by the
geometry (Fisher–Rao distance and Fréchet mean, or ℓ² and arithmetic
mean), seeded by k-means++ and restarted `n_init` times.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.core.config import get_settings
from app.core.errors import ArgumentError
from app.fit.state import FittedCohort
from app.geometry.state import BetaPoint, array_to_points, points_to_array
from app.utils.parallel import run_ordered
from .geometry import Geometry, get_geometry
from .state import ClusteringResult, GeometryChoice, KMeansConfig

logger = logging.getLogger(__name__)


# ============================================================================
# SUPERVISED (NEAREST CLASS CENTROID)
# ============================================================================

def class_centroids(train: FittedCohort, geometry: Geometry) -> Tuple[List[str], np.ndarray]:
    """One mean per class, classes in sorted order."""
    if len(train) == 0:
        raise ArgumentError("training cohort is empty")
    points = train.points_array()
    labels = np.asarray(train.labels, dtype=object)
    classes = train.classes()
    centroids = []
    for cls in classes:
        members = points[labels == cls]
        if len(members) == 0:
            raise ArgumentError(f"class {cls!r} has no training members")
        centroids.append(geometry.mean(members))
    return classes, np.array(centroids)


def supervised_kmeans(
    train: FittedCohort,
    test_points: Sequence[BetaPoint],
    geometry: GeometryChoice,
) -> List[str]:
    geo = get_geometry(geometry)
    classes, centroids = class_centroids(train, geo)
    if len(test_points) == 0:
        return []
    distances = geo.pairwise(points_to_array(test_points), centroids)
    return [classes[i] for i in np.argmin(distances, axis=1)]


# ============================================================================
# UNSUPERVISED
# ============================================================================

def kmeans_plus_plus(
    points: np.ndarray,
    n_clusters: int,
    geometry: Geometry,
    rng: np.random.Generator,
    distances: Optional[np.ndarray] = None,
) -> np.ndarray:
    """k-means++ seeding; returns the indices of the chosen points.

    `distances` is the precomputed point-to-point matrix, if available.
    """
    n = len(points)
    if distances is None:
        distances = geometry.pairwise(points)
    chosen = [int(rng.integers(n))]
    closest = distances[chosen[0]] ** 2
    for _ in range(1, n_clusters):
        total = closest.sum()
        if total <= 0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=closest / total))
        chosen.append(idx)
        closest = np.minimum(closest, distances[idx] ** 2)
    return np.array(chosen)


def _repair_empty(assignments: np.ndarray, point_dist: np.ndarray, n_clusters: int) -> np.ndarray:
    """Give each empty cluster the point farthest from its centroid (taken from a cluster of size > 1)."""
    assignments = assignments.copy()
    for j in range(n_clusters):
        if np.any(assignments == j):
            continue
        sizes = np.bincount(assignments, minlength=n_clusters)
        donors = np.where(sizes[assignments] > 1)[0]
        far = donors[np.argmax(point_dist[donors])]
        logger.debug("--- KMEANS: cluster %d empty, reseeded with point %d ---", j, far)
        assignments[far] = j
        point_dist[far] = 0.0
    return assignments


def lloyd(
    points: np.ndarray,
    init_centroids: np.ndarray,
    geometry: Geometry,
    max_iterations: Optional[int] = None,
) -> ClusteringResult:
    """One Lloyd run from the given centroids.

    The inertia is recorded after every assignment step; it does not increase
    across iterations. Assignment ties go to the lower cluster index.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    centroids = np.array(init_centroids, dtype=float).reshape(-1, 2)
    n_clusters = len(centroids)
    max_iterations = max_iterations or get_settings().kmeans_max_iterations
    rows = np.arange(len(points))

    assignments: Optional[np.ndarray] = None
    history: List[float] = []
    converged = False
    iterations = 0
    while iterations < max_iterations:
        iterations += 1
        dist = geometry.pairwise(points, centroids)
        new = np.argmin(dist, axis=1)
        point_dist = dist[rows, new]
        history.append(float(np.sum(point_dist ** 2)))
        if len(np.unique(new)) < n_clusters:
            new = _repair_empty(new, point_dist.copy(), n_clusters)

        if assignments is not None and np.array_equal(new, assignments):
            converged = True
            break
        assignments = new
        centroids = np.array([
            geometry.mean(points[assignments == j], init=centroids[j]) for j in range(n_clusters)
        ])

    if not converged:
        dist = geometry.pairwise(points, centroids)
        history.append(float(np.sum(dist[rows, assignments] ** 2)))
        logger.warning("--- KMEANS: no stable assignment after %d iterations ---", iterations)

    return ClusteringResult(
        assignments=[int(a) for a in assignments],
        centroids=array_to_points(centroids),
        inertia=history[-1],
        iterations=iterations,
        converged=converged,
        inertia_history=history,
    )


def unsupervised_kmeans(points: Sequence[BetaPoint], cfg: KMeansConfig) -> ClusteringResult:
    """Best of `n_init` k-means++ / Lloyd restarts by inertia (lowest restart index on ties)."""
    arr = points_to_array(points)
    if len(arr) == 0:
        raise ArgumentError("cannot cluster an empty point set")
    if cfg.n_clusters > len(arr):
        raise ArgumentError(f"n_clusters={cfg.n_clusters} larger than the number of points ({len(arr)})")

    geometry = get_geometry(cfg.geometry)
    distances = geometry.pairwise(arr)
    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.n_init)

    def _restart(stream: np.random.SeedSequence) -> ClusteringResult:
        rng = np.random.default_rng(stream)
        seeds = kmeans_plus_plus(arr, cfg.n_clusters, geometry, rng, distances=distances)
        return lloyd(arr, arr[seeds], geometry, cfg.max_iterations)

    runs = run_ordered(_restart, streams, get_settings().max_workers)
    inertias = [r.inertia for r in runs]
    best = runs[int(np.argmin(inertias))]
    best.restart_inertias = inertias
    logger.info(
        "--- KMEANS: %s, %d clusters, best inertia %.6g over %d restarts ---",
        geometry.choice.value, cfg.n_clusters, best.inertia, cfg.n_init,
    )
    return best
