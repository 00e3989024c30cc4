"""Synthetic inputs shaped exactly like the simulator's CSV outputs, so the
figure component can be tested without running any simulation."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
import pytest

SNAPSHOT_TIMES = (0.0, 5.0, 12.5, 20.0)


def write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def make_series(path: Path, oscillating: bool):
    t = np.linspace(0.0, 20.0, 401)
    if oscillating:
        mx, my = 2.0 * np.cos(1.5 * t), 2.0 * np.sin(1.5 * t)
    else:
        mx, my = 0.3 * np.exp(-t / 4.0), -0.2 * np.exp(-t / 4.0)
    var = 0.25 + 0.05 * np.tanh(t)
    rows = zip(t, mx, my, var, var, mx**2 + my**2 + 2 * var,
               np.zeros_like(t), 3 * var**2, np.zeros_like(t), 3 * var**2)
    write_csv(path, ["t", "mean_x", "mean_y", "var_x", "var_y", "r2_mean",
                     "m3_x", "m4_x", "m3_y", "m4_y"], rows)


def make_snapshot(path: Path, seed: int, n: int = 60):
    rng = np.random.default_rng(seed)
    th = rng.uniform(0, 2 * np.pi, n)
    r = 2.0 + 0.3 * rng.standard_normal(n)
    write_csv(path, ["i", "x", "y"],
              zip(range(n), r * np.cos(th), r * np.sin(th)))


def make_path_csv(path: Path, n: int = 128, radius: float = 2.0, t_end: float = 20.0):
    t = np.linspace(0.0, t_end, n, endpoint=False)
    write_csv(path, ["t", "m", "n"],
              zip(t, radius * np.cos(t), radius * np.sin(t)))


def make_manifest(run_dir: Path, roles: dict):
    run_dir.mkdir(parents=True, exist_ok=True)
    payload = {
        "command": "simulate",
        "outputs": [str(v) for v in roles.values() if isinstance(v, (str, Path))],
        "outputs_by_role": {
            k: ({kk: str(vv) for kk, vv in v.items()} if isinstance(v, dict) else str(v))
            for k, v in roles.items()
        },
    }
    (run_dir / "manifest.json").write_text(json.dumps(payload, indent=2))
    return run_dir / "manifest.json"


@pytest.fixture()
def synthetic_runs(tmp_path):
    """Two fake run directories plus a cycle directory, manifests included."""
    dirs = {}
    for run, osc in (("A", True), ("B", False)):
        d = tmp_path / f"run{run}"
        d.mkdir()
        make_series(d / "series.csv", oscillating=osc)
        snaps = {}
        for i, t in enumerate(SNAPSHOT_TIMES):
            p = d / f"snapshot_t{str(t).replace('.', 'p')}.csv"
            make_snapshot(p, seed=10 * i + (0 if run == "A" else 1))
            snaps["%g" % t] = p
        make_path_csv(d / "deterministic.csv", n=401)
        make_manifest(d, {"series": d / "series.csv", "snapshots": snaps,
                          "deterministic": d / "deterministic.csv"})
        dirs[run] = d
    c = tmp_path / "cycle"
    c.mkdir()
    make_path_csv(c / "cycle_alpha1p5.csv", n=256, t_end=4.35)
    make_manifest(c, {"cycle_csv": c / "cycle_alpha1p5.csv",
                      "cycle_json": c / "cycle_alpha1p5.json"})
    dirs["cycle"] = c
    dirs["out"] = tmp_path / "figs"
    return dirs
