"""
Experiment workflow over a fitted cohort:

    classify → cluster → [k_sweep] → report

Every node is deterministic given the seed, so two runs on the same cohort
produce the same report.
"""

import logging
from collections import Counter
from typing import List, Optional

from langgraph.graph import END, StateGraph

from app.fit.state import FittedCohort
from app.learn.kmeans import unsupervised_kmeans
from app.learn.metrics import clustering_accuracy
from app.learn.state import GeometryChoice, KMeansConfig, KnnConfig
from app.learn.validation import cross_validate, knn_k_sweep
from .state import ExperimentReport, ExperimentState

logger = logging.getLogger(__name__)

GEOMETRIES = (GeometryChoice.RIEMANNIAN, GeometryChoice.EUCLIDEAN)
MODELS = ("knn", "skm")


# --- NODES ---

def classify_node(state: ExperimentState):
    logger.info("--- EXPERIMENT: CLASSIFICATION ---")
    results = {}
    for model in MODELS:
        for geometry in GEOMETRIES:
            report = cross_validate(
                state["cohort"], model, KnnConfig(k=state["k"], geometry=geometry),
                folds=state["folds"], seed=state["seed"],
            )
            results[f"{model}/{geometry.value}"] = {
                "mean_accuracy": report.mean_accuracy,
                "std_accuracy": report.std_accuracy,
                "per_fold_accuracy": report.per_fold_accuracy,
            }
    return {"classification": results}


def cluster_node(state: ExperimentState):
    logger.info("--- EXPERIMENT: CLUSTERING ---")
    cohort = state["cohort"]
    results = {}
    for geometry in GEOMETRIES:
        cfg = KMeansConfig(n_clusters=state["n_clusters"], geometry=geometry, seed=state["seed"])
        result = unsupervised_kmeans(cohort.points, cfg)
        results[f"ukm/{geometry.value}"] = {
            "accuracy": clustering_accuracy(result.assignments, cohort.labels),
            "inertia": result.inertia,
            "converged": result.converged,
        }
    return {"clustering": results}


def sweep_node(state: ExperimentState):
    logger.info("--- EXPERIMENT: K SWEEP %s ---", state["ks"])
    sweep = {}
    for geometry in GEOMETRIES:
        by_k = knn_k_sweep(state["cohort"], state["ks"], geometry, folds=state["folds"], seed=state["seed"])
        sweep[geometry.value] = {k: [mean, std] for k, (mean, std) in by_k.items()}
    return {"k_sweep": sweep}


def report_node(state: ExperimentState):
    cohort = state["cohort"]
    report = ExperimentReport(
        subjects=len(cohort),
        classes=dict(sorted(Counter(cohort.labels).items())),
        seed=state["seed"],
        k=state["k"],
        folds=state["folds"],
        n_clusters=state["n_clusters"],
        classification=state.get("classification") or {},
        clustering=state.get("clustering") or {},
        k_sweep=state.get("k_sweep") or {},
    )
    logger.info("--- EXPERIMENT COMPLETE ---")
    return {"report": report}


# --- CONDITIONAL LOGIC ---

def decide_sweep(state: ExperimentState):
    return "k_sweep" if state.get("ks") else "report"


# --- GRAPH CONSTRUCTION ---

workflow = StateGraph(ExperimentState)

workflow.add_node("classify", classify_node)
workflow.add_node("cluster", cluster_node)
workflow.add_node("k_sweep", sweep_node)
workflow.add_node("report", report_node)

workflow.set_entry_point("classify")
workflow.add_edge("classify", "cluster")
workflow.add_conditional_edges("cluster", decide_sweep, {"k_sweep": "k_sweep", "report": "report"})
workflow.add_edge("k_sweep", "report")
workflow.add_edge("report", END)

experiment_graph = workflow.compile()


def run_experiment(
    cohort: FittedCohort,
    seed: int,
    k: int = 7,
    folds: int = 5,
    n_clusters: int = 2,
    ks: Optional[List[int]] = None,
) -> ExperimentReport:
    final = experiment_graph.invoke({
        "cohort": cohort,
        "seed": seed,
        "k": k,
        "folds": folds,
        "n_clusters": n_clusters,
        "ks": list(ks or []),
        "classification": {},
        "clustering": {},
        "k_sweep": {},
        "report": None,
    })
    return final["report"]


# ============================================================================
# MARKDOWN REPORT
# ============================================================================

def _bar(score: float, width: int = 10) -> str:
    filled = max(0, min(width, round(score * width)))
    return "█" * filled + "░" * (width - filled)


def build_markdown(report: ExperimentReport) -> str:
    classes = ", ".join(f"{label}: {n}" for label, n in report.classes.items())
    lines = [
        "## Beta-manifold experiment",
        "",
        f"**Subjects:** {report.subjects} ({classes})  ",
        f"**Seed:** {report.seed}  ",
        f"**Folds:** {report.folds}  ",
        f"**KNN k:** {report.k}",
        "",
        "### Classification accuracy, mean (std)",
        "",
        "| Model | Riemannian | Euclidean |",
        "|-------|------------|-----------|",
    ]
    for model in MODELS:
        cells = []
        for geometry in GEOMETRIES:
            entry = report.classification.get(f"{model}/{geometry.value}")
            cells.append(f"{entry['mean_accuracy']:.2f} ({entry['std_accuracy']:.2f})" if entry else "—")
        lines.append(f"| {model.upper()} | {cells[0]} | {cells[1]} |")

    lines += [
        "",
        f"### Clustering accuracy ({report.n_clusters} clusters)",
        "",
        "| Geometry | Accuracy | Inertia | |",
        "|----------|----------|---------|---|",
    ]
    for geometry in GEOMETRIES:
        entry = report.clustering.get(f"ukm/{geometry.value}")
        if entry:
            lines.append(
                f"| {geometry.value} | {entry['accuracy']:.2f} | {entry['inertia']:.4g} | `{_bar(entry['accuracy'])}` |"
            )

    if report.k_sweep:
        ks = sorted({k for by_k in report.k_sweep.values() for k in by_k})
        lines += [
            "",
            "### KNN accuracy vs k",
            "",
            "| k | " + " | ".join(g.value for g in GEOMETRIES) + " |",
            "|---|" + "---|" * len(GEOMETRIES),
        ]
        for k in ks:
            cells = []
            for geometry in GEOMETRIES:
                mean_std = report.k_sweep.get(geometry.value, {}).get(k)
                cells.append(f"{mean_std[0]:.2f} ({mean_std[1]:.2f})" if mean_std else "—")
            lines.append(f"| {k} | " + " | ".join(cells) + " |")

    return "\n".join(lines) + "\n"
