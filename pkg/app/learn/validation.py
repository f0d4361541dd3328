"""
Stratified K-fold evaluation of KNN and supervised K-means.

Folds come from scikit-learn's StratifiedKFold (shuffled, seeded). KNN
reuses one cohort-wide distance matrix for every fold and every k.
"""

import logging
from collections import Counter
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
from sklearn.model_selection import StratifiedKFold

from app.core.config import get_settings
from app.core.errors import ArgumentError
from app.fit.state import FittedCohort
from app.utils.parallel import run_ordered
from .geometry import get_geometry
from .kmeans import supervised_kmeans
from .knn import knn_from_distances
from .metrics import accuracy
from .state import CvReport, GeometryChoice, KnnConfig, ModelChoice

logger = logging.getLogger(__name__)

Split = Tuple[np.ndarray, np.ndarray]


def stratified_splits(labels: List[str], folds: int, seed: int) -> List[Split]:
    if folds < 2:
        raise ArgumentError(f"folds must be >= 2, got {folds}")
    for cls, count in sorted(Counter(labels).items()):
        if count < folds:
            raise ArgumentError(f"class {cls!r} has {count} members, fewer than {folds} folds")
    skf = StratifiedKFold(n_splits=folds, shuffle=True, random_state=seed)
    return list(skf.split(np.zeros((len(labels), 1)), np.asarray(labels, dtype=object)))


def _check_k(k: int, splits: List[Split]) -> None:
    smallest = min(len(train) for train, _ in splits)
    if k > smallest:
        raise ArgumentError(f"k={k} larger than smallest training fold ({smallest} subjects)")


def _fold_map(cohort: FittedCohort, splits: List[Split]) -> Dict[str, int]:
    ids = cohort.ids
    return {ids[i]: fold for fold, (_, test) in enumerate(splits) for i in test}


def cross_validate(
    cohort: FittedCohort,
    model: ModelChoice,
    cfg: KnnConfig,
    folds: Optional[int] = None,
    seed: int = 0,
) -> CvReport:
    """Per-fold accuracy of `model` ('knn' or 'skm'); `cfg.k` is ignored for skm."""
    folds = folds or get_settings().cv_folds
    labels = cohort.labels
    splits = stratified_splits(labels, folds, seed)
    truth = np.asarray(labels, dtype=object)
    max_workers = get_settings().max_workers

    if model == "knn":
        _check_k(cfg.k, splits)
        distances = get_geometry(cfg.geometry).pairwise(cohort.points_array())

        def _fold(split: Split) -> float:
            train, test = split
            predicted = knn_from_distances(distances[np.ix_(test, train)], truth[train], cfg.k)
            return accuracy(predicted, truth[test])
    elif model == "skm":
        def _fold(split: Split) -> float:
            train, test = split
            test_points = [cohort.entries[i].point for i in test]
            predicted = supervised_kmeans(cohort.subset(train), test_points, cfg.geometry)
            return accuracy(predicted, truth[test])
    else:
        raise ArgumentError(f"unknown model {model!r}; expected 'knn' or 'skm'")

    accuracies = run_ordered(_fold, splits, max_workers)
    report = CvReport.from_folds(
        accuracies,
        model=model,
        geometry=cfg.geometry,
        k=cfg.k if model == "knn" else None,
        folds=folds,
        seed=seed,
        fold_assignments=_fold_map(cohort, splits),
    )
    logger.info(
        "--- CV: %s/%s mean accuracy %.3f (std %.3f) over %d folds ---",
        model, GeometryChoice(cfg.geometry).value, report.mean_accuracy, report.std_accuracy, folds,
    )
    return report


def knn_k_sweep(
    cohort: FittedCohort,
    ks: Iterable[int],
    geometry: GeometryChoice,
    folds: Optional[int] = None,
    seed: int = 0,
) -> Dict[int, Tuple[float, float]]:
    """Cross-validated KNN accuracy as a function of k: k → (mean, std)."""
    folds = folds or get_settings().cv_folds
    ks = sorted(set(int(k) for k in ks))
    if not ks:
        raise ArgumentError("no k values to sweep")
    for k in ks:
        KnnConfig(k=k, geometry=geometry)  # odd, >= 1

    splits = stratified_splits(cohort.labels, folds, seed)
    _check_k(ks[-1], splits)
    truth = np.asarray(cohort.labels, dtype=object)
    distances = get_geometry(geometry).pairwise(cohort.points_array())

    sweep = {}
    for k in ks:
        accs = np.array([
            accuracy(knn_from_distances(distances[np.ix_(test, train)], truth[train], k), truth[test])
            for train, test in splits
        ])
        sweep[k] = (float(accs.mean()), float(accs.std()))
    return sweep
