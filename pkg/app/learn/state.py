"""
Learn State - configuration and result types for classification and clustering.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.core.config import get_settings
from app.geometry.state import BetaPoint


class GeometryChoice(str, Enum):
    RIEMANNIAN = "riemannian"  # Fisher–Rao distance, Fréchet mean
    EUCLIDEAN = "euclidean"    # ℓ² on (x, y), arithmetic mean


ModelChoice = Literal["knn", "skm"]


# ============================================================================
# CONFIGURATION
# ============================================================================

class KnnConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int = Field(default_factory=lambda: get_settings().knn_k, ge=1, description="Number of neighbors")
    geometry: GeometryChoice = Field(default=GeometryChoice.RIEMANNIAN)

    @field_validator("k")
    @classmethod
    def _odd(cls, v: int) -> int:
        if v % 2 == 0:
            raise ValueError(f"k must be odd, got {v}")
        return v


class KMeansConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_clusters: int = Field(..., ge=1)
    geometry: GeometryChoice = Field(default=GeometryChoice.RIEMANNIAN)
    max_iterations: int = Field(default_factory=lambda: get_settings().kmeans_max_iterations, ge=1)
    seed: int = Field(..., description="Master seed; restart streams are spawned from it")
    n_init: int = Field(default_factory=lambda: get_settings().kmeans_n_init, ge=1)


# ============================================================================
# RESULTS
# ============================================================================

class CvReport(BaseModel):
    """Cross-validated accuracy, one entry per fold."""
    model: ModelChoice
    geometry: GeometryChoice
    k: Optional[int] = Field(None, description="Neighbors (knn only)")
    folds: int
    seed: int
    per_fold_accuracy: List[float]
    mean_accuracy: float
    std_accuracy: float = Field(..., ge=0.0, description="Population std (ddof=0) of the fold accuracies")
    fold_assignments: Dict[str, int] = Field(default_factory=dict, description="Subject id → test fold")

    @model_validator(mode="after")
    def _consistent(self):
        accs = np.asarray(self.per_fold_accuracy, dtype=float)
        if len(accs) != self.folds:
            raise ValueError(f"expected {self.folds} fold accuracies, got {len(accs)}")
        if np.any((accs < 0) | (accs > 1)):
            raise ValueError("fold accuracies must lie in [0, 1]")
        if abs(accs.mean() - self.mean_accuracy) > 1e-12 or abs(accs.std() - self.std_accuracy) > 1e-12:
            raise ValueError("mean/std do not match the per-fold accuracies")
        return self

    @classmethod
    def from_folds(cls, accuracies: List[float], **kwargs) -> "CvReport":
        accs = np.asarray(accuracies, dtype=float)
        return cls(
            per_fold_accuracy=[float(a) for a in accs],
            mean_accuracy=float(accs.mean()),
            std_accuracy=float(accs.std()),
            **kwargs,
        )


@dataclass
class ClusteringResult:
    assignments: List[int]
    centroids: List[BetaPoint]
    inertia: float
    iterations: int = 0
    converged: bool = True
    inertia_history: List[float] = field(default_factory=list)
    restart_inertias: List[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "assignments": list(self.assignments),
            "centroids": [c.to_dict() for c in self.centroids],
            "inertia": self.inertia,
            "iterations": self.iterations,
            "converged": self.converged,
            "restart_inertias": list(self.restart_inertias),
        }
