"""Figure rendering: log-log decay traces, trend plots, heatmap pairs.

Output images carry no timestamps (fixed PNG metadata), so identical inputs
produce byte-identical files.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .schema import SchemaError, load_decay_report, load_snapshot, load_timeseries

__all__ = ["FigureSpec", "RenderSummary", "render_decay", "render_profiles"]

DEFAULT_GUIDES = (-0.5, -1.0, -1.5)

# reproducible output: fixed metadata, no creation date
_PNG_METADATA = {"Software": "cfns-plot"}

_SNAP_RE = re.compile(r"^(n|omega|nref)_t(\d+\.\d+)\.snap$")


@dataclass(frozen=True)
class FigureSpec:
    """What to read, what to draw, where to write."""

    indir: Path
    outdir: Path
    quantities: tuple[str, ...] | None = None
    guides: tuple[float, ...] = DEFAULT_GUIDES


@dataclass(frozen=True)
class RenderSummary:
    """What a render call produced, for logging and tests."""

    images: tuple[Path, ...]
    traces: tuple[str, ...] = ()
    guides: tuple[float, ...] = ()


def _save(fig, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=130, metadata=_PNG_METADATA)
    plt.close(fig)


def render_decay(spec: FigureSpec) -> RenderSummary:
    """Log-log decay figure plus the profile-distance trend figure.

    Reads <indir>/timeseries.csv (and decay_report.csv when present, for
    fitted-slope annotations); writes decay.png and trends.png.
    """
    series = load_timeseries(spec.indir / "timeseries.csv")
    report_path = spec.indir / "decay_report.csv"
    fitted = {}
    if report_path.is_file():
        fitted = {r.quantity: r for r in load_decay_report(report_path)}

    traces = list(spec.quantities) if spec.quantities else series.norm_columns()
    for name in traces:
        if name not in series.data:
            raise SchemaError(f"no such timeseries column {name!r}", column=name)

    t = series.times
    positive = t > 0

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for name in traces:
        values = series.data[name][positive]
        label = name
        if name in fitted and np.isfinite(fitted[name].fitted_slope):
            label += f" (fit {fitted[name].fitted_slope:+.2f}, {fitted[name].verdict})"
        ax.loglog(t[positive], np.where(values > 0, values, np.nan), label=label)

    # guide lines anchored to the first trace's earliest positive sample
    anchor_name = traces[0]
    tp = t[positive]
    anchor_value = float(series.data[anchor_name][positive][0])
    for slope in spec.guides:
        guide = anchor_value * (tp / tp[0]) ** slope
        ax.loglog(tp, guide, linestyle="--", color="gray", linewidth=1.0)
        ax.annotate(f"slope {slope:g}", (tp[-1], guide[-1]), fontsize=8,
                    color="gray", ha="left", va="center")
    ax.set_xlabel("t")
    ax.set_ylabel("norm")
    ax.set_title("decay of norms (log-log) with reference slopes")
    ax.legend(fontsize=8, loc="lower left")
    decay_png = spec.outdir / "decay.png"
    _save(fig, decay_png)

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for name in ("prof_n", "prof_omega", "prof_gradc"):
        values = series.data[name][positive]
        ax.plot(t[positive], values, marker=".", label=name)
    ax.set_xlabel("t")
    ax.set_ylabel("weighted profile distance")
    ax.set_title("profile-distance trends")
    ax.legend(fontsize=8)
    trends_png = spec.outdir / "trends.png"
    _save(fig, trends_png)

    return RenderSummary(images=(decay_png, trends_png),
                         traces=tuple(traces), guides=spec.guides)


def _snapshot_pairs(indir: Path) -> list[tuple[str, Path, Path]]:
    tags = {}
    for path in sorted(indir.glob("*.snap")):
        match = _SNAP_RE.match(path.name)
        if match:
            tags.setdefault(match.group(2), {})[match.group(1)] = path
    pairs = []
    for tag in sorted(tags, key=float):
        group = tags[tag]
        if "n" in group and "nref" in group:
            pairs.append((tag, group["n"], group["nref"]))
    return pairs


def render_profiles(spec: FigureSpec) -> RenderSummary:
    """Side-by-side heatmaps of n(t) vs its reference profile, per snapshot.

    Each pair shares one color scale; a third panel shows the pointwise
    difference. Writes profiles_t<tag>.png for every snapshot time.
    """
    pairs = _snapshot_pairs(spec.indir)
    if not pairs:
        raise SchemaError(f"no n/nref snapshot pairs found in {spec.indir}")
    images = []
    for tag, n_path, ref_path in pairs:
        n_snap = load_snapshot(n_path)
        ref_snap = load_snapshot(ref_path)
        if n_snap.values.shape != ref_snap.values.shape:
            raise SchemaError(
                f"snapshot pair at t={tag} has mismatched shapes "
                f"{n_snap.values.shape} vs {ref_snap.values.shape}")
        vmax = max(float(np.max(np.abs(n_snap.values))),
                   float(np.max(np.abs(ref_snap.values))), 1e-300)
        extent = (0.0, n_snap.box_length, 0.0, n_snap.box_length)
        fig, axes = plt.subplots(1, 3, figsize=(12.0, 4.0))
        for ax, snap, title in (
            (axes[0], n_snap, f"n at t={tag}"),
            (axes[1], ref_snap, "reference profile"),
        ):
            image = ax.imshow(snap.values.T, origin="lower", extent=extent,
                              vmin=0.0, vmax=vmax, cmap="viridis")
            ax.set_title(title, fontsize=9)
            fig.colorbar(image, ax=ax, shrink=0.8)
        diff = n_snap.values - ref_snap.values
        dmax = max(float(np.max(np.abs(diff))), 1e-300)
        image = axes[2].imshow(diff.T, origin="lower", extent=extent,
                               vmin=-dmax, vmax=dmax, cmap="RdBu_r")
        axes[2].set_title(f"difference (max |.| = {dmax:.2e})", fontsize=9)
        fig.colorbar(image, ax=axes[2], shrink=0.8)
        out = spec.outdir / f"profiles_t{tag}.png"
        _save(fig, out)
        images.append(out)
    return RenderSummary(images=tuple(images))
