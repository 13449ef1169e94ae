"""CSV and JSON emission with exact-value round-tripping.

Exact rationals serialize as "p/q" strings (plain "p" for integers) and
parse back to identical values; floats use repr, the shortest decimal that
round-trips.  Every CLI run directory carries a manifest echoing the full
parameter set, the backend, the package version, and the wall time, so an
exact-backend run can be reproduced bit for bit from its manifest.
"""

from __future__ import annotations

import csv
import json
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .intervals import rational_str


def fmt(value) -> str:
    """One scalar to text: exact as p/q, float as shortest round-trip."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (Fraction, int)):
        return rational_str(Fraction(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def jsonable(obj):
    """Recursively convert to JSON-safe types; exact values become p/q."""
    if isinstance(obj, Fraction):
        return rational_str(obj)
    if isinstance(obj, (bool, int, float, str)) or obj is None:
        return obj
    if isinstance(obj, dict):
        return {fmt(k) if not isinstance(k, str) else k: jsonable(v)
                for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "_asdict"):
        return jsonable(obj._asdict())
    return str(obj)


def write_csv(path, header, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def write_json(path, payload) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        json.dump(jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


class ManifestTimer:
    """Collects run metadata and writes manifest.json on close."""

    def __init__(self, subcommand: str, parameters: dict, backend: str):
        self.subcommand = subcommand
        self.parameters = parameters
        self.backend = backend
        self.start = time.perf_counter()

    def write(self, out_dir) -> None:
        payload = {
            "subcommand": self.subcommand,
            "parameters": jsonable(self.parameters),
            "backend": self.backend,
            "version": __version__,
            "wall_time_s": time.perf_counter() - self.start,
        }
        write_json(Path(out_dir) / "manifest.json", payload)


def interval_rows(interval_set):
    """CSV rows lo,hi for one interval set (exact or float backend)."""
    return [(iv.lo, iv.hi) for iv in interval_set.intervals]


def generation_rows(gensets):
    """CSV rows (n, chart, slope, lo, hi) across generation sets."""
    rows = []
    for g in gensets:
        d = g.direction
        for iv in g.set.intervals:
            rows.append((g.n, d.chart, d.slope, iv.lo, iv.hi))
    return rows
