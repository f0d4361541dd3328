"""
Cohort fitting and cohort files.

Input formats:
  - JSON lines, one subject per line:
        {"id": "S001", "label": "diseased", "samples": [0.1, ...]}
    or, for binned data,
        {"id": "S001", "label": "diseased", "bin_edges": [...], "counts": [...]}
  - mesh cohorts: an index CSV `id,label,areas_path` whose rows point at
    per-subject CSVs `cell_id,area_t0,area_t1`; samples are the area strains.

Output: fitted cohort CSV `id,label,x,y`, exclusions CSV `id,label,reason`.
"""

import csv
import json
import logging
from pathlib import Path
from typing import List, Optional, Sequence

from pydantic import ValidationError

from app.core.errors import ArgumentError, DegenerateSampleError, InputParseError
from app.geometry.state import BetaPoint
from app.utils.io import write_csv
from .features import area_strain, normalize, samples_from_histogram
from .mle import fit_beta_mle
from .state import Exclusion, FittedCohort, FittedSubject, NormalizationConfig, SubjectRecord

logger = logging.getLogger(__name__)

COHORT_HEADER = ("id", "label", "x", "y")
EXCLUSION_HEADER = ("id", "label", "reason")


# ============================================================================
# FITTING
# ============================================================================

def fit_cohort(
    records: Sequence[SubjectRecord],
    cfg: Optional[NormalizationConfig] = None,
) -> FittedCohort:
    """Fit every subject, in input order.

    Subjects whose samples cannot carry a beta fit end up in `exclusions`
    with the reason; the run itself never fails on them.
    """
    cohort = FittedCohort()
    for record in records:
        samples = normalize(record.samples, cfg) if cfg is not None else record.samples
        try:
            result = fit_beta_mle(samples)
        except (DegenerateSampleError, ArgumentError) as exc:
            logger.warning("--- FIT: excluding %s: %s ---", record.id, exc)
            cohort.exclusions.append(Exclusion(record.id, record.label, str(exc)))
            continue
        cohort.entries.append(FittedSubject(record.id, record.label, result.point, result.method))

    fallbacks = sum(1 for e in cohort.entries if e.method != "newton")
    logger.info(
        "--- FIT: %d fitted, %d excluded, %d moments fallbacks ---",
        len(cohort.entries), len(cohort.exclusions), fallbacks,
    )
    return cohort


# ============================================================================
# READERS
# ============================================================================

def _record_from_json(payload: dict) -> SubjectRecord:
    if not isinstance(payload, dict):
        raise ArgumentError("each line must be a JSON object")
    if "samples" not in payload and "bin_edges" in payload:
        payload = dict(payload)
        edges = payload.pop("bin_edges")
        counts = payload.pop("counts", None)
        if counts is None:
            raise ArgumentError("'bin_edges' given without 'counts'")
        payload["samples"] = samples_from_histogram(edges, counts).tolist()
    return SubjectRecord(**payload)


def load_subjects(path: str) -> List[SubjectRecord]:
    records: List[SubjectRecord] = []
    seen = set()
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise InputParseError(f"cannot read subjects file: {exc.strerror}", path=path) from exc

    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = _record_from_json(json.loads(line))
        except json.JSONDecodeError as exc:
            raise InputParseError(f"invalid JSON: {exc.msg}", path=path, line=lineno) from exc
        except ValidationError as exc:
            first = exc.errors()[0]
            field = ".".join(str(p) for p in first["loc"]) or "record"
            raise InputParseError(f"invalid subject ({field}): {first['msg']}", path=path, line=lineno) from exc
        except (ArgumentError, TypeError) as exc:
            raise InputParseError(f"invalid subject: {exc}", path=path, line=lineno) from exc
        if record.id in seen:
            raise InputParseError(f"duplicate subject id {record.id!r}", path=path, line=lineno)
        seen.add(record.id)
        records.append(record)

    if not records:
        raise InputParseError("no subjects found", path=path)
    logger.info("--- LOAD: %d subjects from %s ---", len(records), path)
    return records


def _read_csv_rows(path: str, required: Sequence[str]):
    """Yield (line_number, row dict) after checking the header."""
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise InputParseError(f"cannot read file: {exc.strerror}", path=path) from exc
    with fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise InputParseError(f"missing column(s) {', '.join(missing)}", path=path, line=1)
        for row in reader:
            yield reader.line_num, row


def _read_areas(path: str):
    a0, a1 = [], []
    for lineno, row in _read_csv_rows(path, ("cell_id", "area_t0", "area_t1")):
        try:
            a0.append(float(row["area_t0"]))
            a1.append(float(row["area_t1"]))
        except (TypeError, ValueError) as exc:
            raise InputParseError("area values must be numbers", path=path, line=lineno) from exc
    return a0, a1


def load_mesh_cohort(index_path: str) -> List[SubjectRecord]:
    """Area-strain subjects from an index CSV; relative area paths resolve against the index."""
    base = Path(index_path).parent
    records: List[SubjectRecord] = []
    for lineno, row in _read_csv_rows(index_path, ("id", "label", "areas_path")):
        areas_path = Path(row["areas_path"])
        if not areas_path.is_absolute():
            areas_path = base / areas_path
        a0, a1 = _read_areas(str(areas_path))
        try:
            strain = area_strain(a0, a1)
            records.append(SubjectRecord(id=row["id"], label=row["label"], samples=strain.tolist()))
        except (ArgumentError, ValidationError) as exc:
            raise InputParseError(f"subject {row['id']!r}: {exc}", path=index_path, line=lineno) from exc

    if not records:
        raise InputParseError("no subjects found", path=index_path)
    return records


def read_fitted_cohort(path: str) -> FittedCohort:
    cohort = FittedCohort()
    for lineno, row in _read_csv_rows(path, COHORT_HEADER):
        try:
            point = BetaPoint(float(row["x"]), float(row["y"]))
        except (TypeError, ValueError) as exc:
            raise InputParseError(f"invalid point: {exc}", path=path, line=lineno) from exc
        cohort.entries.append(FittedSubject(row["id"], row["label"], point))

    if not cohort.entries:
        raise InputParseError("fitted cohort is empty", path=path)
    return cohort


# ============================================================================
# WRITERS
# ============================================================================

def exclusions_path(output_path: str) -> str:
    return f"{output_path}.exclusions.csv"


def write_fitted_cohort(path: str, cohort: FittedCohort) -> List[str]:
    """Write the cohort CSV and its exclusion report; returns both paths."""
    write_csv(path, COHORT_HEADER, ((e.id, e.label, e.point.x, e.point.y) for e in cohort.entries))
    report = exclusions_path(path)
    write_csv(report, EXCLUSION_HEADER, ((e.id, e.label, e.reason) for e in cohort.exclusions))
    return [path, report]
