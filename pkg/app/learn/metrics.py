"""Accuracy of predicted labels and of cluster assignments."""

from itertools import permutations
from typing import Hashable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from app.core.errors import ArgumentError

EXHAUSTIVE_MAX_CLUSTERS = 6


def accuracy(predicted: Sequence[Hashable], truth: Sequence[Hashable]) -> float:
    if len(predicted) != len(truth):
        raise ArgumentError(f"length mismatch: {len(predicted)} predictions, {len(truth)} labels")
    if len(truth) == 0:
        raise ArgumentError("accuracy of an empty set")
    return float(np.mean([p == t for p, t in zip(predicted, truth)]))


def contingency(assignments: Sequence[Hashable], labels: Sequence[Hashable]) -> np.ndarray:
    """Square count matrix, cluster rows × label columns, zero-padded."""
    clusters = sorted(set(assignments), key=repr)
    classes = sorted(set(labels), key=repr)
    size = max(len(clusters), len(classes))
    row = {c: i for i, c in enumerate(clusters)}
    col = {c: j for j, c in enumerate(classes)}
    table = np.zeros((size, size), dtype=int)
    for a, l in zip(assignments, labels):
        table[row[a], col[l]] += 1
    return table


def clustering_accuracy(assignments: Sequence[Hashable], labels: Sequence[Hashable]) -> float:
    """Best accuracy over one-to-one mappings of cluster indices onto labels."""
    if len(assignments) != len(labels):
        raise ArgumentError(f"length mismatch: {len(assignments)} assignments, {len(labels)} labels")
    if len(labels) == 0:
        raise ArgumentError("clustering accuracy of an empty set")

    table = contingency(assignments, labels)
    size = table.shape[0]
    if len(set(assignments)) <= EXHAUSTIVE_MAX_CLUSTERS and size <= EXHAUSTIVE_MAX_CLUSTERS:
        rows = np.arange(size)
        best = max(int(table[rows, list(perm)].sum()) for perm in permutations(range(size)))
    else:
        r, c = linear_sum_assignment(table, maximize=True)
        best = int(table[r, c].sum())
    return best / len(labels)
