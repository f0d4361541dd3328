"""
betageo: command-line entry point.

Subcommands:
    fit             fit beta distributions to subject samples → cohort CSV
    geodesic        geodesic between two beta distributions → CSV t,x,y,u,v
    ball            geodesic ball around a point → CSV theta,x,y,truncated
    curvature-grid  sectional curvature on a log-spaced grid → CSV x,y,K
    classify        cross-validated KNN / supervised K-means → JSON
    cluster         unsupervised K-means → JSON
    synth           seeded synthetic cohort → JSON lines
    experiment      full classification/clustering report → JSON + Markdown

Usage:
    python main.py fit --input subjects.jsonl --clamp -0.5 0.5 --output cohort.csv
    python main.py classify --cohort cohort.csv --model knn --geometry riemannian --seed 0 --output cv.json

Every command writes `<output>.manifest.json` next to its output.

Exit codes:
    0  success
    1  numerical failure (non-convergence, boundary escape)
    2  usage or parse error
"""

import argparse
import json
import logging
import sys
import time
from typing import Dict, List, Optional

from pydantic import ValidationError

from app import __version__
from app.core.config import get_settings, override_settings
from app.core.errors import BetaGeometryError
from app.core.logging import configure_logging
from app.fit import (
    cohort_max_config,
    exclusions_path,
    fit_cohort,
    load_mesh_cohort,
    load_subjects,
    read_fitted_cohort,
    synthetic_cohort,
    write_fitted_cohort,
)
from app.fit.state import NormalizationConfig
from app.geometry import BetaPoint, curvature_grid, distance, geodesic_ball, geodesic_bvp
from app.learn import (
    GeometryChoice,
    KMeansConfig,
    KnnConfig,
    clustering_accuracy,
    cross_validate,
    unsupervised_kmeans,
)
from app.pipeline import build_markdown, run_experiment
from app.utils.io import RunManifest, atomic_write_text, write_csv, write_json, write_manifest

logger = logging.getLogger("app.cli")

SETTINGS_FLAGS = {
    "steps": "ivp_steps",
    "boundary_guard": "boundary_guard",
    "shooting_tolerance": "shooting_tolerance",
    "shooting_max_iterations": "shooting_max_iterations",
    "karcher_tolerance": "karcher_tolerance",
    "karcher_max_iterations": "karcher_max_iterations",
    "mle_tolerance": "mle_tolerance",
    "mle_max_iterations": "mle_max_iterations",
    "max_workers": "max_workers",
}


# ============================================================================
# HELPERS
# ============================================================================

def _point(x: float, y: float) -> BetaPoint:
    return BetaPoint(x, y)


def _finish(command: str, args, outputs: Dict[str, str], inputs: Optional[Dict[str, str]] = None,
            seed: Optional[int] = None, extra: Optional[dict] = None) -> None:
    config = get_settings().model_dump()
    config.update({k: v for k, v in vars(args).items() if k not in ("func", "command") and not k.startswith("_")})
    config.update(extra or {})
    manifest = RunManifest(
        command=command,
        config=json.loads(json.dumps(config, default=str)),
        seed=seed,
        inputs=inputs or {},
        outputs=outputs,
        duration_s=round(time.perf_counter() - args._started, 3),
    )
    write_manifest(outputs["output"], manifest)


# ============================================================================
# COMMANDS
# ============================================================================

def cmd_fit(args) -> int:
    if args.input:
        records = load_subjects(args.input)
        inputs = {"input": args.input}
    else:
        records = load_mesh_cohort(args.mesh_index)
        inputs = {"mesh_index": args.mesh_index}

    if args.clamp:
        cfg = NormalizationConfig(lower=args.clamp[0], upper=args.clamp[1])
    elif args.cohort_max:
        cfg = cohort_max_config(records)
    else:
        cfg = None

    cohort = fit_cohort(records, cfg)
    write_fitted_cohort(args.output, cohort)
    _finish(
        "fit", args,
        outputs={"output": args.output, "exclusions": exclusions_path(args.output)},
        inputs=inputs,
        extra={"normalization": cfg.model_dump() if cfg else None},
    )
    print(f"fitted {len(cohort)} subjects, {len(cohort.exclusions)} excluded → {args.output}")
    return 0


def cmd_geodesic(args) -> int:
    start, end = _point(args.x0, args.y0), _point(args.x1, args.y1)
    if start == end:
        rows = [(0.0, start.x, start.y, 0.0, 0.0)]
        d = 0.0
    else:
        rows = geodesic_bvp(start, end, args.steps).rows()
        d = distance(start, end)
    write_csv(args.output, ("t", "x", "y", "u", "v"), rows)
    _finish("geodesic", args, outputs={"output": args.output}, extra={"distance": d})
    print(repr(d))
    return 0


def cmd_ball(args) -> int:
    center = _point(args.center_x, args.center_y)
    points = geodesic_ball(center, args.radius, args.directions, args.steps)
    write_csv(
        args.output, ("theta", "x", "y", "truncated"),
        ((p.theta, p.x, p.y, int(p.truncated)) for p in points),
    )
    truncated = sum(p.truncated for p in points)
    _finish("ball", args, outputs={"output": args.output}, extra={"truncated": truncated})
    print(f"{len(points)} directions, {truncated} truncated → {args.output}")
    return 0


def cmd_curvature_grid(args) -> int:
    rows = curvature_grid(args.xmin, args.xmax, args.ymin, args.ymax, args.n)
    write_csv(args.output, ("x", "y", "K"), rows)
    _finish("curvature-grid", args, outputs={"output": args.output})
    print(f"{len(rows)} nodes, max K = {max(r.K for r in rows)!r} → {args.output}")
    return 0


def cmd_classify(args) -> int:
    cohort = read_fitted_cohort(args.cohort)
    if args.model == "knn":
        cfg = KnnConfig(k=args.k if args.k is not None else get_settings().knn_k, geometry=args.geometry)
    else:
        if args.k is not None:
            logger.warning("--- CLASSIFY: --k is ignored for the skm model ---")
        cfg = KnnConfig(k=1, geometry=args.geometry)  # k unused by skm
    report = cross_validate(cohort, args.model, cfg, folds=args.folds, seed=args.seed)
    write_json(args.output, report.model_dump(mode="json"))
    _finish("classify", args, outputs={"output": args.output}, inputs={"cohort": args.cohort}, seed=args.seed)
    print(f"{args.model}/{cfg.geometry.value}: {report.mean_accuracy:.2f} ({report.std_accuracy:.2f})")
    return 0


def cmd_cluster(args) -> int:
    cohort = read_fitted_cohort(args.cohort)
    cfg_values = {"n_clusters": args.n_clusters, "geometry": args.geometry, "seed": args.seed}
    if args.n_init is not None:
        cfg_values["n_init"] = args.n_init
    if args.max_iterations is not None:
        cfg_values["max_iterations"] = args.max_iterations
    cfg = KMeansConfig(**cfg_values)

    result = unsupervised_kmeans(cohort.points, cfg)
    acc = clustering_accuracy(result.assignments, cohort.labels)
    payload = result.to_dict()
    payload.update({
        "ids": cohort.ids,
        "accuracy": acc,
        "geometry": cfg.geometry.value,
        "n_clusters": cfg.n_clusters,
        "seed": cfg.seed,
    })
    write_json(args.output, payload)
    _finish("cluster", args, outputs={"output": args.output}, inputs={"cohort": args.cohort}, seed=args.seed)
    print(f"ukm/{cfg.geometry.value}: accuracy {acc:.2f}, inertia {result.inertia:.6g}")
    return 0


def cmd_synth(args) -> int:
    records = synthetic_cohort(
        n_per_class=args.n_per_class, n_samples=args.n_samples, jitter=args.jitter, seed=args.seed,
    )
    lines = [json.dumps(r.model_dump()) for r in records]
    atomic_write_text(args.output, "\n".join(lines) + "\n")
    _finish("synth", args, outputs={"output": args.output}, seed=args.seed)
    print(f"{len(records)} subjects → {args.output}")
    return 0


def cmd_experiment(args) -> int:
    cohort = read_fitted_cohort(args.cohort)
    k = args.k if args.k is not None else get_settings().knn_k
    folds = args.folds or get_settings().cv_folds
    report = run_experiment(cohort, seed=args.seed, k=k, folds=folds, n_clusters=args.n_clusters, ks=args.ks)
    write_json(args.output_json, report.model_dump(mode="json"))
    atomic_write_text(args.output_md, build_markdown(report))
    _finish(
        "experiment", args,
        outputs={"output": args.output_json, "markdown": args.output_md},
        inputs={"cohort": args.cohort},
        seed=args.seed,
    )
    print(build_markdown(report))
    return 0


# ============================================================================
# PARSER
# ============================================================================

def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("solver")
    g.add_argument("--steps", type=int, default=None, help="RK4 steps over [0, 1] (default: 100)")
    g.add_argument("--boundary-guard", type=float, default=None, help="Boundary escape threshold (default: 1e-8)")
    g.add_argument("--shooting-tolerance", type=float, default=None, help="Shooting endpoint residual (default: 1e-6)")
    g.add_argument("--shooting-max-iterations", type=int, default=None, help="Shooting Newton iterations (default: 50)")


def _add_learning_flags(p: argparse.ArgumentParser) -> None:
    _add_solver_flags(p)
    g = p.add_argument_group("learning")
    g.add_argument("--karcher-tolerance", type=float, default=None, help="Fréchet mean gradient tolerance (default: 1e-6)")
    g.add_argument("--karcher-max-iterations", type=int, default=None, help="Karcher flow iterations (default: 100)")
    g.add_argument("--max-workers", type=int, default=None, help="Threads for folds and restarts (default: 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="betageo",
        description="Fisher–Rao geometry of beta distributions: fitting, geodesics, classification",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, metavar="LEVEL", help="DEBUG, INFO, WARNING (default: INFO)")
    sub = parser.add_subparsers(dest="command", required=True)

    # fit
    p = sub.add_parser("fit", help="Fit beta distributions to subject samples")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", metavar="FILE", help="JSON-lines subjects")
    src.add_argument("--mesh-index", metavar="FILE", help="Index CSV id,label,areas_path (area strain)")
    norm = p.add_mutually_exclusive_group()
    norm.add_argument("--clamp", nargs=2, type=float, metavar=("P", "Q"), help="Clamp to [P, Q] and rescale to [0, 1]")
    norm.add_argument("--cohort-max", action="store_true", help="Normalize by the population maximum")
    p.add_argument("--mle-tolerance", type=float, default=None, help="ML gradient tolerance (default: 1e-8)")
    p.add_argument("--mle-max-iterations", type=int, default=None, help="Newton iterations (default: 50)")
    p.add_argument("--output", required=True, metavar="FILE")
    p.set_defaults(func=cmd_fit)

    # geodesic
    p = sub.add_parser("geodesic", help="Geodesic between two beta distributions")
    for name in ("x0", "y0", "x1", "y1"):
        p.add_argument(name, type=float)
    p.add_argument("--output", required=True, metavar="FILE")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_geodesic)

    # ball
    p = sub.add_parser("ball", help="Geodesic ball around a point")
    p.add_argument("center_x", type=float)
    p.add_argument("center_y", type=float)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--directions", type=int, default=64)
    p.add_argument("--output", required=True, metavar="FILE")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_ball)

    # curvature-grid
    p = sub.add_parser("curvature-grid", help="Sectional curvature on a log-spaced grid")
    for name in ("xmin", "xmax", "ymin", "ymax"):
        p.add_argument(name, type=float)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--output", required=True, metavar="FILE")
    p.set_defaults(func=cmd_curvature_grid)

    geometries = [g.value for g in GeometryChoice]

    # classify
    p = sub.add_parser("classify", help="Cross-validated classification")
    p.add_argument("--cohort", required=True, metavar="FILE", help="Fitted cohort CSV")
    p.add_argument("--model", choices=["knn", "skm"], default="knn")
    p.add_argument("--geometry", choices=geometries, default=GeometryChoice.RIEMANNIAN.value)
    p.add_argument("--k", type=int, default=None, help="Neighbors, odd (default: 7)")
    p.add_argument("--folds", type=int, default=None, help="CV folds (default: 5)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--output", required=True, metavar="FILE")
    _add_learning_flags(p)
    p.set_defaults(func=cmd_classify)

    # cluster
    p = sub.add_parser("cluster", help="Unsupervised K-means")
    p.add_argument("--cohort", required=True, metavar="FILE", help="Fitted cohort CSV")
    p.add_argument("--geometry", choices=geometries, default=GeometryChoice.RIEMANNIAN.value)
    p.add_argument("--n-clusters", type=int, default=2)
    p.add_argument("--n-init", type=int, default=None, help="Restarts (default: 10)")
    p.add_argument("--max-iterations", type=int, default=None, help="Lloyd iterations (default: 100)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--output", required=True, metavar="FILE")
    _add_learning_flags(p)
    p.set_defaults(func=cmd_cluster)

    # synth
    p = sub.add_parser("synth", help="Seeded synthetic two-class cohort")
    p.add_argument("--n-per-class", type=int, default=50)
    p.add_argument("--n-samples", type=int, default=200)
    p.add_argument("--jitter", type=float, default=0.1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--output", required=True, metavar="FILE")
    p.set_defaults(func=cmd_synth)

    # experiment
    p = sub.add_parser("experiment", help="Classification + clustering report")
    p.add_argument("--cohort", required=True, metavar="FILE", help="Fitted cohort CSV")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--folds", type=int, default=None)
    p.add_argument("--n-clusters", type=int, default=2)
    p.add_argument("--ks", type=int, nargs="*", default=[], help="k values for the accuracy-vs-k sweep")
    p.add_argument("--output-json", default="experiment.json", metavar="FILE")
    p.add_argument("--output-md", default="experiment.md", metavar="FILE")
    _add_learning_flags(p)
    p.set_defaults(func=cmd_experiment)

    return parser


# ============================================================================
# MAIN
# ============================================================================

def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._started = time.perf_counter()

    try:
        override_settings(**{
            field: getattr(args, flag) for flag, field in SETTINGS_FLAGS.items() if hasattr(args, flag)
        }, log_level=args.log_level)
        settings = get_settings()
        configure_logging(settings.log_level, settings.log_file)
        return args.func(args)
    except BetaGeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValidationError as exc:
        first = exc.errors()[0]
        field = ".".join(str(p) for p in first["loc"]) or exc.title
        print(f"error: invalid {field}: {first['msg']}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
