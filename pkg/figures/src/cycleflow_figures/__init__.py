"""Figure rendering for cycleflow outputs; reads CSV/JSON files only."""

__version__ = "0.1.0"

from .jobs import FigureJob, SchemaError
from .plots import moments_figure, plot_moments, plot_snapshots, render_all, snapshots_figure

__all__ = [
    "FigureJob",
    "SchemaError",
    "moments_figure",
    "plot_moments",
    "plot_snapshots",
    "render_all",
    "snapshots_figure",
]
