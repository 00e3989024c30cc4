"""Figure job description and input validation.

A job names every input CSV (two moment series, per-time particle
snapshots for each run, the sampled cycle, the deterministic mean
trajectory) plus the output image paths.  Validation checks existence,
column schemas, and non-emptiness up front so rendering never half-writes
an image.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SERIES_COLUMNS = ("t", "mean_x", "mean_y", "var_x", "var_y", "r2_mean",
                  "m3_x", "m4_x", "m3_y", "m4_y")
SNAPSHOT_COLUMNS = ("i", "x", "y")
PATH_COLUMNS = ("t", "m", "n")
SNAPSHOT_TIMES = (0.0, 5.0, 12.5, 20.0)


class SchemaError(ValueError):
    """An input file is missing, empty, or lacks documented columns."""


def read_columns(path: Path, required: tuple[str, ...]) -> dict[str, np.ndarray]:
    if not Path(path).exists():
        raise SchemaError(f"input file does not exist: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file is empty") from None
        rows = list(reader)
    missing = [c for c in required if c not in header]
    if missing:
        raise SchemaError(f"{path}: missing columns {missing} (header: {header})")
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    out = {}
    for name in required:
        j = header.index(name)
        out[name] = np.array([float(r[j]) for r in rows])
    return out


def _load_manifest(spec: str | Path) -> dict:
    p = Path(spec)
    if p.is_dir():
        p = p / "manifest.json"
    if not p.exists():
        raise SchemaError(f"manifest not found: {p}")
    return json.loads(p.read_text())


@dataclass(frozen=True)
class FigureJob:
    series_a: Path
    series_b: Path
    snapshots_a: dict[float, Path]
    snapshots_b: dict[float, Path]
    cycle: Path
    deterministic: Path
    out_dir: Path
    snapshot_times: tuple[float, ...] = SNAPSHOT_TIMES

    @property
    def out_moments(self) -> Path:
        return self.out_dir / "moments"

    @property
    def out_snapshots_a(self) -> Path:
        return self.out_dir / "snapshots_runA"

    @property
    def out_snapshots_b(self) -> Path:
        return self.out_dir / "snapshots_runB"

    @classmethod
    def from_manifests(cls, run_a: str | Path, run_b: str | Path,
                       cycle: str | Path, out_dir: str | Path) -> "FigureJob":
        """Wire a job from the manifests the simulation and cycle commands
        wrote (paths may point at the manifest file or its directory)."""
        ma = _load_manifest(run_a)
        mb = _load_manifest(run_b)
        mc = _load_manifest(cycle)
        try:
            roles_a = ma["outputs_by_role"]
            roles_b = mb["outputs_by_role"]
            cycle_csv = mc["outputs_by_role"]["cycle_csv"]
        except KeyError as exc:
            raise SchemaError(f"manifest missing role {exc}") from None
        return cls(
            series_a=Path(roles_a["series"]),
            series_b=Path(roles_b["series"]),
            snapshots_a={float(k): Path(v) for k, v in roles_a["snapshots"].items()},
            snapshots_b={float(k): Path(v) for k, v in roles_b["snapshots"].items()},
            cycle=Path(cycle_csv),
            deterministic=Path(roles_a["deterministic"]),
            out_dir=Path(out_dir),
        )

    def validate(self) -> None:
        """Check every input before any rendering happens."""
        read_columns(self.series_a, SERIES_COLUMNS)
        read_columns(self.series_b, SERIES_COLUMNS)
        read_columns(self.cycle, PATH_COLUMNS)
        read_columns(self.deterministic, PATH_COLUMNS)
        for label, snaps in (("run A", self.snapshots_a), ("run B", self.snapshots_b)):
            missing = [t for t in self.snapshot_times if t not in snaps]
            if missing:
                raise SchemaError(f"{label}: missing snapshot times {missing}")
            for t in self.snapshot_times:
                read_columns(snaps[t], SNAPSHOT_COLUMNS)
