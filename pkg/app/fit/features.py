"""
Per-subject features: area strain of a mesh, clamp-and-rescale normalization
to [0, 1], and expansion of binned histograms into samples.
"""

from typing import Sequence

import numpy as np

from app.core.errors import ArgumentError
from .state import NormalizationConfig, SubjectRecord


def area_strain(areas_t0: Sequence[float], areas_t1: Sequence[float]) -> np.ndarray:
    """Relative area change per cell: (a¹ − a⁰) / a⁰. Every value is > −1."""
    a0 = np.asarray(areas_t0, dtype=float)
    a1 = np.asarray(areas_t1, dtype=float)
    if a0.shape != a1.shape or a0.ndim != 1:
        raise ArgumentError(f"area lists differ in length: {a0.size} vs {a1.size}")
    if a0.size == 0:
        raise ArgumentError("area lists are empty")
    if not (np.all(a0 > 0) and np.all(a1 > 0)):
        raise ArgumentError("cell areas must be strictly positive")
    return (a1 - a0) / a0


def normalize(samples: Sequence[float], cfg: NormalizationConfig) -> np.ndarray:
    """Clamp to [p, q] then rescale to [0, 1]."""
    values = np.asarray(samples, dtype=float)
    p, q = cfg.lower, cfg.upper
    return (np.minimum(np.maximum(values, p), q) - p) / (q - p)


def samples_from_histogram(bin_edges: Sequence[float], counts: Sequence[int]) -> np.ndarray:
    """Bin centers repeated by their counts."""
    edges = np.asarray(bin_edges, dtype=float)
    weights = np.asarray(counts)
    if edges.ndim != 1 or weights.ndim != 1 or edges.size != weights.size + 1:
        raise ArgumentError(f"histogram needs len(bin_edges) == len(counts) + 1, got {edges.size} and {weights.size}")
    if np.any(np.diff(edges) <= 0):
        raise ArgumentError("bin edges must be strictly increasing")
    if np.any(weights < 0) or np.any(weights != np.round(weights)):
        raise ArgumentError("histogram counts must be non-negative integers")
    if weights.sum() == 0:
        raise ArgumentError("histogram is empty")
    centers = 0.5 * (edges[:-1] + edges[1:])
    return np.repeat(centers, weights.astype(int))


def cohort_max_config(records: Sequence[SubjectRecord]) -> NormalizationConfig:
    """Normalize by the maximal value in the whole population.

    The bound depends on every subject, so it leaks information across
    train/test splits; only used behind an explicit flag.
    """
    if not records:
        raise ArgumentError("cohort is empty")
    top = max(max(r.samples) for r in records)
    if not top > 0:
        raise ArgumentError(f"cohort maximum must be positive to normalize by it, got {top}")
    return NormalizationConfig(lower=0.0, upper=float(top))
