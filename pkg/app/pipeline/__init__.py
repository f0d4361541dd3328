from .state import ExperimentReport, ExperimentState
from .graph import build_markdown, experiment_graph, run_experiment

__all__ = ["ExperimentReport", "ExperimentState", "build_markdown", "experiment_graph", "run_experiment"]
