"""Readers for the documented cfns artifact formats.

timeseries.csv
    Header: a fixed leading block
        t,mass,circulation,min_n,max_c,n_L1,n_Linf,grad_n_Linf,grad_c_Linf,grad2_c_Linf
    then zero or more per-exponent norm columns matching
        (n|grad_c|omega|grad_omega)_L<exponent>   (exponent: number or "inf")
    then the fixed trailing block
        prof_n,prof_omega,prof_gradc
    Every data cell is a float; the time column is strictly increasing.

decay_report.csv
    Header: quantity,fitted_slope,paper_slope,band,pass
    with the last cell one of pass / fail / skip.

snapshots (*.snap)
    One ASCII header line "CFNS1 <name> <n_points> <box_length> <time>\n"
    followed by n_points**2 little-endian float64 values, row-major.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "SchemaError",
    "FIXED_LEAD",
    "FIXED_TAIL",
    "Timeseries",
    "load_timeseries",
    "DecayReportRow",
    "load_decay_report",
    "SnapshotData",
    "load_snapshot",
]

FIXED_LEAD = (
    "t", "mass", "circulation", "min_n", "max_c",
    "n_L1", "n_Linf", "grad_n_Linf", "grad_c_Linf", "grad2_c_Linf",
)
FIXED_TAIL = ("prof_n", "prof_omega", "prof_gradc")

_QUANTITY_RE = re.compile(r"^(n|grad_c|omega|grad_omega)_L(\d+(?:\.\d+)?|inf)$")


class SchemaError(ValueError):
    """An input file violates its documented schema.

    The offending column (or field) is recorded in `column` and named in the
    message so the CLI can surface it on exit.
    """

    def __init__(self, message: str, column: str | None = None):
        super().__init__(message)
        self.column = column


@dataclass(frozen=True)
class Timeseries:
    """Parsed timeseries.csv: column order plus one array per column."""

    columns: tuple[str, ...]
    data: dict[str, np.ndarray]

    @property
    def times(self) -> np.ndarray:
        return self.data["t"]

    def norm_columns(self) -> list[str]:
        """The decaying norm columns, fixed block and per-exponent alike."""
        skip = {"t", "mass", "circulation", "min_n", "max_c"}
        return [c for c in self.columns
                if c not in skip and c not in FIXED_TAIL]


def _validate_header(header: list[str]) -> None:
    lead = len(FIXED_LEAD)
    tail = len(FIXED_TAIL)
    if len(header) < lead + tail:
        raise SchemaError(
            f"timeseries header has {len(header)} columns, "
            f"expected at least {lead + tail}")
    for i, expected in enumerate(FIXED_LEAD):
        if header[i] != expected:
            raise SchemaError(
                f"timeseries column {i + 1} is {header[i]!r}, expected {expected!r}",
                column=header[i])
    for i, expected in enumerate(FIXED_TAIL):
        got = header[len(header) - tail + i]
        if got != expected:
            raise SchemaError(
                f"timeseries trailing column is {got!r}, expected {expected!r}",
                column=got)
    seen = set(FIXED_LEAD)
    for name in header[lead:len(header) - tail]:
        if not _QUANTITY_RE.match(name):
            raise SchemaError(f"unrecognized timeseries column {name!r}", column=name)
        if name in seen:
            raise SchemaError(f"duplicate timeseries column {name!r}", column=name)
        seen.add(name)


def load_timeseries(path: Path | str) -> Timeseries:
    path = Path(path)
    if not path.is_file():
        raise SchemaError(f"timeseries file not found: {path}")
    lines = path.read_text().strip().split("\n")
    header = lines[0].split(",")
    _validate_header(header)
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(header):
            raise SchemaError(
                f"timeseries line {lineno} has {len(cells)} cells, "
                f"expected {len(header)}")
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            bad = next(c for c in cells if not _is_float(c))
            column = header[cells.index(bad)]
            raise SchemaError(
                f"timeseries line {lineno}, column {column!r}: "
                f"not a number: {bad!r}", column=column) from None
    if not rows:
        raise SchemaError("timeseries has no data rows")
    table = np.array(rows)
    t = table[:, 0]
    if np.any(np.diff(t) <= 0):
        raise SchemaError("timeseries column 't' is not strictly increasing",
                          column="t")
    data = {name: table[:, i] for i, name in enumerate(header)}
    return Timeseries(columns=tuple(header), data=data)


def _is_float(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


@dataclass(frozen=True)
class DecayReportRow:
    quantity: str
    fitted_slope: float
    paper_slope: float
    band: float
    verdict: str


def load_decay_report(path: Path | str) -> list[DecayReportRow]:
    path = Path(path)
    if not path.is_file():
        raise SchemaError(f"decay report not found: {path}")
    lines = path.read_text().strip().split("\n")
    expected = "quantity,fitted_slope,paper_slope,band,pass"
    if lines[0] != expected:
        raise SchemaError(
            f"decay report header is {lines[0]!r}, expected {expected!r}")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != 5:
            raise SchemaError(f"decay report line {lineno}: expected 5 cells")
        if cells[4] not in ("pass", "fail", "skip"):
            raise SchemaError(
                f"decay report line {lineno}: verdict must be "
                f"pass/fail/skip, got {cells[4]!r}", column="pass")
        try:
            rows.append(DecayReportRow(
                quantity=cells[0],
                fitted_slope=float(cells[1]),
                paper_slope=float(cells[2]),
                band=float(cells[3]),
                verdict=cells[4],
            ))
        except ValueError:
            raise SchemaError(
                f"decay report line {lineno}: non-numeric slope cell") from None
    return rows


@dataclass(frozen=True)
class SnapshotData:
    name: str
    n_points: int
    box_length: float
    time: float
    values: np.ndarray


def load_snapshot(path: Path | str) -> SnapshotData:
    path = Path(path)
    if not path.is_file():
        raise SchemaError(f"snapshot not found: {path}")
    with open(path, "rb") as handle:
        header = handle.readline().decode("ascii", errors="replace")
        parts = header.split()
        if len(parts) != 5 or parts[0] != "CFNS1":
            raise SchemaError(f"{path.name}: not a CFNS1 snapshot")
        name = parts[1]
        try:
            n_points = int(parts[2])
            box_length = float(parts[3])
            time = float(parts[4])
        except ValueError:
            raise SchemaError(f"{path.name}: malformed snapshot header") from None
        payload = handle.read()
    expected = n_points * n_points * 8
    if len(payload) != expected:
        raise SchemaError(
            f"{path.name}: snapshot payload is {len(payload)} bytes, "
            f"expected {expected}")
    values = np.frombuffer(payload, dtype="<f8").reshape(n_points, n_points)
    return SnapshotData(name=name, n_points=n_points, box_length=box_length,
                        time=time, values=values)
