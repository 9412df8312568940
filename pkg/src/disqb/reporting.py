"""Bit-stable CSV/JSON emission and the run manifest.

Floating-point values are written with 12 significant digits, rows in time
order, so reruns with the same seed produce byte-identical data files
regardless of the worker count.  summary.json additionally records the wall
time and is therefore the one intentionally non-reproducible file.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path

from .ensemble import EnsembleResult

CURVE_COLUMNS = (
    "t",
    "ergotropy_mean",
    "ergotropy_stderr",
    "fidelity_mean",
    "fidelity_stderr",
    "power_mean",
    "coherent_mean",
    "incoherent_mean",
    "coherence_mean",
)

COST_COLUMNS = (
    "delta",
    "model",
    "mean_c_int",
    "stderr_c_int",
    "mean_c_ch",
    "stderr_c_ch",
    "mean_c_int_norm",
    "stderr_c_int_norm",
    "mean_c_ch_norm",
    "stderr_c_ch_norm",
)


def _fmt(x) -> str:
    """12-significant-digit text; NaN (undefined value) becomes an empty field."""
    if isinstance(x, float) and math.isnan(x):
        return ""
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def curve_rows(result: EnsembleResult):
    for k, t in enumerate(result.t):
        yield (
            float(t),
            float(result.means["ergotropy"][k]),
            float(result.stderrs["ergotropy"][k]),
            float(result.means["fidelity"][k]),
            float(result.stderrs["fidelity"][k]),
            float(result.means["power"][k]),
            float(result.means["coherent"][k]),
            float(result.means["incoherent"][k]),
            float(result.means["coherence"][k]),
        )


def emit_csv(rows, columns, path: Path) -> Path:
    """RFC-4180 CSV with the exact header given; rows may be empty."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])
    return path


def emit_curves(result: EnsembleResult, path: Path) -> Path:
    return emit_csv(curve_rows(result), CURVE_COLUMNS, path)


def emit_cost_csv(stats_rows, path: Path) -> Path:
    rows = [
        tuple(row[c] if c == "model" else float(row[c]) for c in COST_COLUMNS)
        for row in stats_rows
    ]
    return emit_csv(rows, COST_COLUMNS, path)


def summary_payload(result: EnsembleResult, extra: dict | None = None) -> dict:
    e_max = result.e_max
    payload = {
        "config": result.config.as_dict() if result.config else None,
        "n_realizations": result.n_realizations,
        "e_max": {
            "mean": float(e_max.mean()),
            "min": float(e_max.min()),
            "max": float(e_max.max()),
            "stderr": float(e_max.std(ddof=1) / math.sqrt(e_max.size)) if e_max.size > 1 else 0.0,
        },
        "degeneracy_count": result.degeneracy_count,
        "resample_audit": [{"realization": n, "attempts": a} for n, a in result.resample_audit],
        "wall_time_seconds": result.wall_time,
    }
    if result.certificate is not None:
        payload["convergence_certificate"] = result.certificate.as_dict()
    if extra:
        payload.update(extra)
    return payload


def emit_json(payload: dict, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def sha256_of(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(output_dir: Path, files, config_path=None) -> Path:
    """List every emitted file with its SHA-256.

    Data files hash identically across same-seed reruns; summary.json does
    not (it records wall time by design).
    """
    output_dir = Path(output_dir)
    entries = [
        {"path": str(Path(f).relative_to(output_dir)), "sha256": sha256_of(f)}
        for f in sorted(files, key=str)
    ]
    payload = {
        "output_dir": str(output_dir),
        "config_file": str(config_path) if config_path else None,
        "files": entries,
    }
    return emit_json(payload, output_dir / "manifest.json")
