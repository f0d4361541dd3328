"""
Fit State - subject records, normalization bounds and fitted cohorts.
"""

from dataclasses import dataclass, field
from typing import List, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.geometry.state import BetaPoint


# ============================================================================
# INPUT MODELS
# ============================================================================

class SubjectRecord(BaseModel):
    """One subject: raw measurements of variable length."""
    model_config = ConfigDict(frozen=True)

    id: str = Field(..., min_length=1, description="Subject identifier")
    label: str = Field(..., description="Class label (e.g. diseased / control)")
    samples: List[float] = Field(..., min_length=1, description="Raw sample values")


class NormalizationConfig(BaseModel):
    """Clamp-and-rescale bounds: x ↦ (min(max(x, lower), upper) − lower) / (upper − lower)."""
    model_config = ConfigDict(frozen=True)

    lower: float = Field(..., description="p: values at or below map to 0")
    upper: float = Field(..., description="q: values at or above map to 1")

    @model_validator(mode="after")
    def _check_order(self):
        if not self.lower < self.upper:
            raise ValueError(f"normalization needs lower < upper, got p={self.lower}, q={self.upper}")
        return self


# ============================================================================
# FIT RESULTS
# ============================================================================

FitMethod = Literal["newton", "moments-fallback"]


@dataclass
class FitResult:
    point: BetaPoint
    log_likelihood: float
    method: FitMethod
    iterations: int
    gradient_norm: float = 0.0

    def to_dict(self) -> dict:
        return {
            "x": self.point.x,
            "y": self.point.y,
            "log_likelihood": self.log_likelihood,
            "method": self.method,
            "iterations": self.iterations,
            "gradient_norm": self.gradient_norm,
        }


@dataclass(frozen=True)
class FittedSubject:
    id: str
    label: str
    point: BetaPoint
    method: FitMethod = "newton"


@dataclass(frozen=True)
class Exclusion:
    id: str
    label: str
    reason: str


@dataclass
class FittedCohort:
    """Fitted subjects in input order plus the subjects whose fit degenerated."""
    entries: List[FittedSubject] = field(default_factory=list)
    exclusions: List[Exclusion] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def ids(self) -> List[str]:
        return [e.id for e in self.entries]

    @property
    def labels(self) -> List[str]:
        return [e.label for e in self.entries]

    @property
    def points(self) -> List[BetaPoint]:
        return [e.point for e in self.entries]

    def points_array(self) -> np.ndarray:
        return np.array([[e.point.x, e.point.y] for e in self.entries], dtype=float).reshape(-1, 2)

    def classes(self) -> List[str]:
        """Distinct labels, sorted."""
        return sorted(set(self.labels))

    def subset(self, indices) -> "FittedCohort":
        return FittedCohort(entries=[self.entries[i] for i in indices])
