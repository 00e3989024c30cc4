"""CSV and JSON writers for every file format the command-line tools emit.

All floats are written with 17 significant digits so that re-reading a CSV
reproduces the exact binary values and identical runs produce byte-identical
files.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .flow import LimitCycle, Trajectory
from .lyapunov import CertReport
from .particles import Ensemble, MomentSeries

FLOAT_FMT = "%.17g"

SERIES_COLUMNS = [
    "t", "mean_x", "mean_y", "var_x", "var_y", "r2_mean",
    "m3_x", "m4_x", "m3_y", "m4_y",
]
TRAJECTORY_COLUMNS = ["t", "m", "n"]
SNAPSHOT_COLUMNS = ["i", "x", "y"]
SWEEP_COLUMNS = ["alpha", "inf_value", "lipschitz_margin", "positive", "estimated_c"]


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return FLOAT_FMT % float(v)


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def read_csv(path: Path) -> dict[str, np.ndarray]:
    """Columns of a CSV keyed by header name.  Numeric columns come back as
    float arrays ('true'/'false' map to 1/0); anything else stays a string
    array."""
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = [row for row in r]
    cols = {}
    for j, name in enumerate(header):
        vals = [row[j] for row in rows]
        try:
            conv = [1.0 if v == "true" else 0.0 if v == "false" else float(v)
                    for v in vals]
            cols[name] = np.array(conv)
        except ValueError:
            cols[name] = np.array(vals)
    return cols


def write_trajectory_csv(path: Path, traj: Trajectory) -> None:
    write_csv(path, TRAJECTORY_COLUMNS,
              zip(traj.times, traj.points[:, 0], traj.points[:, 1]))


def write_cycle_csv(path: Path, cycle: LimitCycle) -> None:
    write_csv(path, TRAJECTORY_COLUMNS,
              zip(cycle.sample_times, cycle.samples[:, 0], cycle.samples[:, 1]))


def write_cycle_descriptor(path: Path, cycle: LimitCycle, annulus_check: bool,
                           winding: int) -> None:
    payload = {
        "alpha": cycle.alpha,
        "period": cycle.period,
        "sample_count": len(cycle.samples),
        "annulus_check": bool(annulus_check),
        "winding_number": int(winding),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_series_csv(path: Path, series: MomentSeries) -> None:
    if series.cm_x.shape[1] < 3:
        raise ValueError("series CSV needs centered moments up to order 4 (k_max >= 4)")
    rows = zip(
        series.times, series.mean_x, series.mean_y,
        series.cm_x[:, 0], series.cm_y[:, 0], series.r2_mean,
        series.cm_x[:, 1], series.cm_x[:, 2],
        series.cm_y[:, 1], series.cm_y[:, 2],
    )
    write_csv(path, SERIES_COLUMNS, rows)


def write_snapshot_csv(path: Path, e: Ensemble) -> None:
    write_csv(path, SNAPSHOT_COLUMNS, zip(range(len(e.x)), e.x, e.y))


def write_cert_report_json(path: Path, report: CertReport) -> None:
    payload = {
        "alpha": report.alpha,
        "grid_radial": report.grid_radial,
        "grid_angular": report.grid_angular,
        "inf_value": report.inf_value,
        "argmin": [report.argmin.m, report.argmin.n],
        "lipschitz_margin": report.lipschitz_margin,
        "positive": report.positive,
        "estimated_c": report.estimated_c,
        "delta_used": report.delta_used,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_sweep_csv(path: Path, reports: list[CertReport]) -> None:
    rows = [
        (r.alpha, r.inf_value, r.lipschitz_margin, r.positive, r.estimated_c)
        for r in reports
    ]
    write_csv(path, SWEEP_COLUMNS, rows)


def write_manifest(path: Path, manifest: dict) -> None:
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")
