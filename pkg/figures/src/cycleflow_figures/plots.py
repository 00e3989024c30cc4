"""Rendering: a four-panel moment-trace figure and one four-panel snapshot
grid per run, written as SVG plus a PNG preview.

Output is deterministic for fixed inputs: a fixed style, a fixed SVG hash
salt, and stripped date metadata.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .jobs import (  # noqa: E402
    PATH_COLUMNS,
    SERIES_COLUMNS,
    SNAPSHOT_COLUMNS,
    FigureJob,
    read_columns,
)

plt.rcParams["svg.hashsalt"] = "cycleflow-figures"

PARTICLE_COLOR = "red"
DETERMINISTIC_COLOR = "blue"
CYCLE_COLOR = "black"


def _save(fig, stem: Path) -> list[Path]:
    stem.parent.mkdir(parents=True, exist_ok=True)
    svg = stem.with_suffix(".svg")
    png = stem.with_suffix(".png")
    fig.savefig(svg, metadata={"Date": None})
    fig.savefig(png, dpi=140)
    plt.close(fig)
    return [svg, png]


def moments_figure(series_a: dict, series_b: dict):
    """2x2 grid: one row per run, means on the left, variances on the right."""
    fig, axes = plt.subplots(2, 2, figsize=(11.0, 6.5), constrained_layout=True)
    for row, (series, label) in enumerate(((series_a, "eps = 0.25 (run A)"),
                                           (series_b, "eps = 0.5 (run B)"))):
        t = series["t"]
        ax = axes[row, 0]
        ax.plot(t, series["mean_x"], label="mean x", color="tab:blue")
        ax.plot(t, series["mean_y"], label="mean y", color="tab:orange")
        ax.set_xlabel("t")
        ax.set_ylabel("mean")
        ax.set_title(f"particle means, {label}")
        ax.legend(loc="upper right")
        ax = axes[row, 1]
        ax.plot(t, series["var_x"], label="var x", color="tab:blue")
        ax.plot(t, series["var_y"], label="var y", color="tab:orange")
        ax.set_xlabel("t")
        ax.set_ylabel("variance")
        ax.set_title(f"particle variances, {label}")
        ax.legend(loc="lower right")
    return fig


def plot_moments(job: FigureJob) -> list[Path]:
    """Render the moment traces for both runs; returns the written paths."""
    series_a = read_columns(job.series_a, SERIES_COLUMNS)
    series_b = read_columns(job.series_b, SERIES_COLUMNS)
    fig = moments_figure(series_a, series_b)
    return _save(fig, job.out_moments)


def snapshots_figure(snaps: dict[float, dict], cycle: dict, det: dict,
                     times: tuple[float, ...], label: str):
    """2x2 scatter grid at the requested times with the deterministic path
    (dotted, point marked) and the closed cycle (solid) overlaid."""
    fig, axes = plt.subplots(2, 2, figsize=(9.0, 9.0), constrained_layout=True)
    cyc_m = np.append(cycle["m"], cycle["m"][0])
    cyc_n = np.append(cycle["n"], cycle["n"][0])
    for ax, t in zip(axes.ravel(), times):
        snap = snaps[t]
        upto = det["t"] <= t + 1e-9
        k = int(np.argmin(np.abs(det["t"] - t)))
        ax.scatter(snap["x"], snap["y"], s=6, color=PARTICLE_COLOR,
                   alpha=0.6, linewidths=0.0, label="particles")
        ax.plot(det["m"][upto], det["n"][upto], linestyle=":",
                color=CYCLE_COLOR, linewidth=1.0, label="deterministic path")
        ax.plot(cyc_m, cyc_n, linestyle="-", color=CYCLE_COLOR,
                linewidth=1.2, label="limit cycle")
        ax.plot([det["m"][k]], [det["n"][k]], marker="o", markersize=7.0,
                color=DETERMINISTIC_COLOR, linestyle="none",
                label="deterministic point")
        ax.set_title(f"{label}, t = {t:g}")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_aspect("equal")
        ax.set_xlim(-3.6, 3.6)
        ax.set_ylim(-3.6, 3.6)
    axes[0, 0].legend(loc="upper left", fontsize=8)
    return fig


def plot_snapshots(job: FigureJob) -> list[Path]:
    """Render the snapshot grids for both runs; returns the written paths."""
    cycle = read_columns(job.cycle, PATH_COLUMNS)
    det = read_columns(job.deterministic, PATH_COLUMNS)
    written = []
    for snaps_paths, label, stem in (
        (job.snapshots_a, "run A", job.out_snapshots_a),
        (job.snapshots_b, "run B", job.out_snapshots_b),
    ):
        missing = [t for t in job.snapshot_times if t not in snaps_paths]
        if missing:
            from .jobs import SchemaError

            raise SchemaError(f"{label}: missing snapshot times {missing}")
        snaps = {t: read_columns(snaps_paths[t], SNAPSHOT_COLUMNS)
                 for t in job.snapshot_times}
        fig = snapshots_figure(snaps, cycle, det, job.snapshot_times, label)
        written.extend(_save(fig, stem))
    return written


def render_all(job: FigureJob) -> list[Path]:
    """Validate then render every figure of the job."""
    job.validate()
    return plot_moments(job) + plot_snapshots(job)
