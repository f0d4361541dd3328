from typing import Dict, List, Optional, TypedDict

from pydantic import BaseModel, Field

from app.fit.state import FittedCohort


class ExperimentReport(BaseModel):
    """Table-style summary: classification accuracy per model and geometry,
    clustering accuracy per geometry and the accuracy-vs-k sweep."""
    subjects: int
    classes: Dict[str, int] = Field(default_factory=dict, description="Label → subject count")
    seed: int
    k: int
    folds: int
    n_clusters: int
    classification: Dict[str, dict] = Field(default_factory=dict)
    clustering: Dict[str, dict] = Field(default_factory=dict)
    k_sweep: Dict[str, Dict[int, List[float]]] = Field(default_factory=dict, description="geometry → k → [mean, std]")


class ExperimentState(TypedDict):
    # Inputs
    cohort: FittedCohort
    seed: int
    k: int
    folds: int
    n_clusters: int
    ks: List[int]

    # Node outputs, keyed "<model>/<geometry>"
    classification: Dict[str, dict]
    clustering: Dict[str, dict]
    k_sweep: Dict[str, Dict[int, List[float]]]

    report: Optional[ExperimentReport]
