"""Binary field snapshots.

Format: one ASCII header line

    CFNS1 <name> <n_points> <box_length> <time>\n

followed by n_points^2 little-endian IEEE-754 64-bit values, row-major.
Floats in the header are written with repr so read(write(x)) is bit-exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .spectral import GridSpec, RealField

__all__ = ["Snapshot", "write_snapshot", "read_snapshot"]

_MAGIC = "CFNS1"


@dataclass(frozen=True)
class Snapshot:
    name: str
    field: RealField
    time: float


def write_snapshot(path: str | Path, snap: Snapshot) -> None:
    grid = snap.field.grid
    header = (
        f"{_MAGIC} {snap.name} {grid.n_points} "
        f"{grid.box_length!r} {snap.time!r}\n"
    )
    data = np.ascontiguousarray(snap.field.values, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(data.tobytes())


def read_snapshot(path: str | Path) -> Snapshot:
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii")
        parts = header.split()
        if len(parts) != 5 or parts[0] != _MAGIC:
            raise ValueError(f"{path}: not a {_MAGIC} snapshot")
        name = parts[1]
        n_points = int(parts[2])
        box_length = float(parts[3])
        time = float(parts[4])
        raw = fh.read(n_points * n_points * 8)
        if len(raw) != n_points * n_points * 8:
            raise ValueError(f"{path}: truncated snapshot payload")
        values = np.frombuffer(raw, dtype="<f8").reshape(n_points, n_points).copy()
    grid = GridSpec(n_points=n_points, box_length=box_length)
    return Snapshot(name=name, field=RealField(grid, values), time=time)
