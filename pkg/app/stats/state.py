"""
Stats State - configuration and results of intrinsic means.
"""

from dataclasses import dataclass, field
from typing import List

from pydantic import BaseModel, ConfigDict, Field

from app.core.config import get_settings
from app.geometry.state import BetaPoint


class KarcherConfig(BaseModel):
    """Karcher flow parameters."""
    model_config = ConfigDict(frozen=True)

    step_size: float = Field(default=1.0, gt=0, le=1.0, description="τ in exp(τ/n Σ log)")
    max_iterations: int = Field(default=100, gt=0)
    gradient_tolerance: float = Field(default=1e-6, gt=0, description="Stop when the metric norm of the mean log is below this")

    @classmethod
    def from_settings(cls) -> "KarcherConfig":
        settings = get_settings()
        return cls(
            step_size=settings.karcher_step_size,
            max_iterations=settings.karcher_max_iterations,
            gradient_tolerance=settings.karcher_tolerance,
        )


@dataclass
class MeanResult:
    mean: BetaPoint
    iterations_used: int
    final_gradient_norm: float
    converged: bool
    # Σ d²(mean, Bᵢ) after each accepted iterate, starting with the initial point
    functional_history: List[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "mean": self.mean.to_dict(),
            "iterations_used": self.iterations_used,
            "final_gradient_norm": self.final_gradient_norm,
            "converged": self.converged,
        }
