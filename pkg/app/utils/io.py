"""
Output helpers: atomic file writes, CSV/JSON emitters and run manifests.

Every command output is written to a temporary file in the target directory
and moved into place with os.replace, so readers never see partial files.
"""

import csv
import io
import json
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence

from pydantic import BaseModel, Field

from app import __version__


def atomic_write_text(path: str, content: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=str(target.parent))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(content)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_float(value: float) -> str:
    """Shortest round-trip representation (deterministic across runs)."""
    return repr(float(value))


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(v) if isinstance(v, float) else v for v in row])
    return buffer.getvalue()


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    atomic_write_text(path, render_csv(header, rows))


def render_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_json(path: str, payload: Any) -> None:
    atomic_write_text(path, render_json(payload))


# ============================================================================
# RUN MANIFEST
# ============================================================================

class RunManifest(BaseModel):
    """Everything needed to reproduce one command run."""
    command: str = Field(..., description="CLI subcommand")
    config: Dict[str, Any] = Field(default_factory=dict, description="Fully resolved configuration")
    seed: Optional[int] = Field(None, description="Master seed, when the command is stochastic")
    inputs: Dict[str, str] = Field(default_factory=dict)
    outputs: Dict[str, str] = Field(default_factory=dict)
    tool_version: str = Field(default=__version__)
    started_at: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    duration_s: float = Field(default=0.0)


def manifest_path(output_path: str) -> str:
    return f"{output_path}.manifest.json"


def write_manifest(output_path: str, manifest: RunManifest) -> str:
    path = manifest_path(output_path)
    write_json(path, manifest.model_dump())
    return path
