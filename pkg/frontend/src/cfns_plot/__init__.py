"""Post-processing renderer for cfns run artifacts.

Reads only the documented on-disk formats (timeseries.csv, decay_report.csv,
CFNS1 snapshots) and produces log-log decay figures, profile-distance trend
plots and side-by-side heatmaps. No coupling to the simulator's internals.
"""

from .schema import SchemaError, load_decay_report, load_snapshot, load_timeseries
from .figures import FigureSpec, render_decay, render_profiles

__all__ = [
    "SchemaError",
    "load_timeseries",
    "load_decay_report",
    "load_snapshot",
    "FigureSpec",
    "render_decay",
    "render_profiles",
]
