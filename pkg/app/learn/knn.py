"""K-nearest-neighbor classification under a chosen geometry."""

from typing import List, Sequence

import numpy as np

from app.core.errors import ArgumentError
from app.fit.state import FittedCohort
from app.geometry.state import BetaPoint, points_to_array
from .geometry import get_geometry
from .state import KnnConfig


def vote(neighbor_labels: Sequence[str]) -> str:
    """Majority label; ties go to the label whose nearest member ranks first."""
    counts = {}
    for label in neighbor_labels:
        counts[label] = counts.get(label, 0) + 1
    best = max(counts.values())
    # dict keeps first-seen order, i.e. neighbor rank
    return next(label for label, c in counts.items() if c == best)


def knn_from_distances(distances: np.ndarray, train_labels: Sequence[str], k: int) -> List[str]:
    """Predict from a (n_test, n_train) distance matrix.

    Equal distances are ordered by training index (stable sort).
    """
    labels = np.asarray(train_labels, dtype=object)
    if k > distances.shape[1]:
        raise ArgumentError(f"k={k} larger than the training set ({distances.shape[1]})")
    order = np.argsort(distances, axis=1, kind="stable")[:, :k]
    return [vote(labels[row]) for row in order]


def knn_classify(train: FittedCohort, test_points: Sequence[BetaPoint], cfg: KnnConfig) -> List[str]:
    if len(train) == 0:
        raise ArgumentError("training cohort is empty")
    if cfg.k > len(train):
        raise ArgumentError(f"k={cfg.k} larger than the training set ({len(train)})")
    if len(test_points) == 0:
        return []
    geometry = get_geometry(cfg.geometry)
    distances = geometry.pairwise(points_to_array(test_points), train.points_array())
    return knn_from_distances(distances, train.labels, cfg.k)
