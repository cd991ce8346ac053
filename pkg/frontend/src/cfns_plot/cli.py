"""Command-line front end.

    cfns-plot <decay|profiles> --in DIR --out DIR [--guides S1,S2,...]

Exit codes: 0 success, 1 missing or schema-violating input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import DEFAULT_GUIDES, FigureSpec, render_decay, render_profiles
from .schema import SchemaError

__all__ = ["main", "entry"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfns-plot",
        description="Render decay figures and profile heatmaps from cfns run artifacts",
    )
    parser.add_argument("command", choices=["decay", "profiles"])
    parser.add_argument("--in", dest="indir", required=True,
                        help="run output directory (timeseries.csv, snapshots)")
    parser.add_argument("--out", dest="outdir", required=True,
                        help="directory for the rendered images")
    parser.add_argument("--guides", default=None,
                        help="comma-separated guide slopes (default -0.5,-1,-1.5)")
    return parser


def _parse_guides(raw: str | None) -> tuple[float, ...]:
    if raw is None:
        return DEFAULT_GUIDES
    try:
        return tuple(float(item) for item in raw.split(",") if item.strip())
    except ValueError:
        raise SchemaError(f"--guides must be comma-separated numbers, got {raw!r}") from None


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(
            indir=Path(args.indir),
            outdir=Path(args.outdir),
            guides=_parse_guides(args.guides),
        )
        render = render_decay if args.command == "decay" else render_profiles
        summary = render(spec)
    except SchemaError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    for image in summary.images:
        print(f"wrote {image}")
    return 0


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
