from __future__ import annotations

import csv
import json
import logging
import platform
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

logger = logging.getLogger(__name__)

TRAJECTORY_COLUMNS = [
    "repetition", "framework", "shot", "control", "outcome",
    "estimate", "error", "empirical_loss", "zeta", "dzeta",
]
ESTIMATE_COLUMNS = [
    "repetition", "framework", "estimate", "error", "empirical_loss",
    "f_mean", "clamped", "zeta", "dzeta",
]


def _plain(value: Any) -> Any:
    """JSON/CSV friendly scalars; numpy types and non-finite floats included."""
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if not np.isfinite(value):
            return None if np.isnan(value) else ("inf" if value > 0 else "-inf")
        return value
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def write_csv(path: Path, rows: Iterable[Mapping[str, Any]], columns: Sequence[str]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(columns), extrasaction="raise", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if row.get(k) is None else _plain(row.get(k))) for k in columns})
    return path


def write_json(path: Path, payload: Mapping[str, Any]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_plain(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _version(package: str) -> str:
    try:
        return metadata.version(package)
    except metadata.PackageNotFoundError:
        return "unknown"


def build_manifest(config_json: str, config_hash: str, seed: int, run_id: str, files: Sequence[str]) -> dict[str, Any]:
    return {
        "run_id": run_id,
        "config": json.loads(config_json),
        "config_sha256": config_hash,
        "seed": seed,
        "files": sorted(files),
        "versions": {
            "qsense": _version("qsense"),
            "numpy": _version("numpy"),
            "scipy": _version("scipy"),
            "pydantic": _version("pydantic"),
            "python": platform.python_version(),
        },
        "created_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
