"""Shared fixtures: schema-exact synthetic run artifacts."""

import numpy as np
import pytest

COLUMNS = (
    "t", "mass", "circulation", "min_n", "max_c",
    "n_L1", "n_Linf", "grad_n_Linf", "grad_c_Linf", "grad2_c_Linf",
    "n_L2", "grad_c_L4", "omega_L2", "grad_omega_L1.5",
    "prof_n", "prof_omega", "prof_gradc",
)

SLOPES = {
    "n_Linf": -1.0, "grad_n_Linf": -1.5, "grad_c_Linf": -0.5,
    "grad2_c_Linf": -1.0, "n_L1": 0.0, "n_L2": -0.5,
    "grad_c_L4": -0.25, "omega_L2": -0.5, "grad_omega_L1.5": -5.0 / 6.0,
    "prof_n": -0.5, "prof_omega": -0.5, "prof_gradc": -0.5,
}


def synthetic_timeseries_text():
    """A small-data-shaped timeseries.csv with exact power-law columns."""
    lines = [",".join(COLUMNS)]
    for t in np.arange(0.0, 51.0, 1.0):
        tt = max(t, 1.0)
        row = []
        for name in COLUMNS:
            if name == "t":
                value = t
            elif name == "mass":
                value = 0.5
            elif name == "circulation":
                value = 0.5
            elif name == "min_n":
                value = 0.0
            elif name == "max_c":
                value = 0.1
            else:
                value = 2.0 * tt ** SLOPES[name]
            row.append(f"{value:.16e}")
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def write_snapshot_bytes(path, name, n_points, box_length, time, values):
    header = f"CFNS1 {name} {n_points} {box_length!r} {time!r}\n".encode("ascii")
    path.write_bytes(header + np.asarray(values, dtype="<f8").tobytes())


@pytest.fixture
def run_dir(tmp_path):
    """A directory shaped like a cfns run output."""
    (tmp_path / "timeseries.csv").write_text(synthetic_timeseries_text())
    (tmp_path / "decay_report.csv").write_text(
        "quantity,fitted_slope,paper_slope,band,pass\n"
        "n_Linf,-0.970000,-1.000000,0.150000,pass\n"
        "grad_c_Linf,-0.455000,-0.500000,0.150000,pass\n"
        "omega_L2,-0.485000,-0.500000,0.150000,pass\n"
        "prof_gradc,0.039000,nan,nan,skip\n"
    )
    grid = np.linspace(0.0, 10.0, 32, endpoint=False)
    xx, yy = np.meshgrid(grid, grid, indexing="ij")
    for t in (10.0, 40.0):
        bump = 0.5 / (4.0 * np.pi * t) * np.exp(
            -((xx - 5.0) ** 2 + (yy - 5.0) ** 2) / (4.0 * t))
        write_snapshot_bytes(tmp_path / f"n_t{t:.6f}.snap", "n", 32, 10.0, t, bump)
        write_snapshot_bytes(tmp_path / f"nref_t{t:.6f}.snap", "nref", 32, 10.0, t, bump)
        write_snapshot_bytes(tmp_path / f"omega_t{t:.6f}.snap", "omega", 32, 10.0, t,
                             np.zeros_like(bump))
    return tmp_path
