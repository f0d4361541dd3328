"""Seeded synthetic cohorts: per-class beta parameters with multiplicative jitter."""

from typing import Dict, List, Optional, Tuple

import numpy as np

from app.core.errors import ArgumentError
from .state import SubjectRecord

DEFAULT_CLASSES: Dict[str, Tuple[float, float]] = {
    "diseased": (2.0, 8.0),
    "control": (8.0, 2.0),
}


def synthetic_cohort(
    n_per_class: int = 50,
    n_samples: int = 200,
    class_params: Optional[Dict[str, Tuple[float, float]]] = None,
    jitter: float = 0.1,
    seed: int = 0,
) -> List[SubjectRecord]:
    """Subjects of each class draw (x, y)·(1 + U(−jitter, jitter)) and then
    `n_samples` values from that beta distribution. Classes are emitted in
    the given order, subjects numbered S000, S001, ...
    """
    if n_per_class < 1 or n_samples < 2:
        raise ArgumentError("need n_per_class >= 1 and n_samples >= 2")
    if not 0 <= jitter < 1:
        raise ArgumentError(f"jitter must be in [0, 1), got {jitter}")
    class_params = class_params or DEFAULT_CLASSES

    rng = np.random.default_rng(seed)
    records: List[SubjectRecord] = []
    for label, (x, y) in class_params.items():
        for _ in range(n_per_class):
            fx, fy = 1.0 + rng.uniform(-jitter, jitter, size=2)
            samples = rng.beta(x * fx, y * fy, size=n_samples)
            records.append(
                SubjectRecord(id=f"S{len(records):03d}", label=label, samples=samples.tolist())
            )
    return records
