"""Machine-readable run reports: JSON payloads plus CSV side files.

A report embeds the config that produced it.  The deterministic part
(config, version, results) serializes with sorted keys so identical runs
produce byte-identical payloads; wall-clock timings live in a separate
``timings`` section excluded from that guarantee.
"""

from __future__ import annotations

import csv
import json
import os
from pathlib import Path

from . import __version__

OUTPUT_DIR_ENV = "RYDQEC_OUTPUT_DIR"


def resolve_output_dir(explicit: str | None) -> Path:
    path = Path(explicit or os.environ.get(OUTPUT_DIR_ENV, "."))
    path.mkdir(parents=True, exist_ok=True)
    return path


def build_report(config: dict, results: dict, timings: dict[str, float] | None = None) -> dict:
    return {
        "config": config,
        "version": __version__,
        "results": results,
        "timings": {k: round(v, 6) for k, v in (timings or {}).items()},
    }


def deterministic_payload(report: dict) -> str:
    """The byte-stable part of a report (everything except timings)."""
    stable = {k: v for k, v in report.items() if k != "timings"}
    return json.dumps(stable, sort_keys=True, separators=(",", ":"))


def write_report(path: Path, report: dict) -> Path:
    path.write_text(json.dumps(report, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return path


def write_csv(path: Path, rows: list[dict], columns: list[str]) -> Path:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=columns)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row[k] for k in columns})
    return path
