"""Harness: CSV schema, decay/rescale reports and the command-line entry."""

import math

import numpy as np
import pytest

from cfns.cli import main
from cfns.config import parse_config
from cfns.diagnostics import CheckpointRecord, TimeSeries, paper_slope
from cfns.harness import (
    csv_columns,
    decay_report,
    rescale_report,
    run_rescale_check,
    simulate,
    write_decay_csv,
    write_timeseries_csv,
)
from cfns.kernels import heat_kernel
from cfns.snapshot import read_snapshot
from cfns.spectral import GridSpec

TINY = """
grid.n_points = 64
grid.box_length = 10.0
init.sigma_n = 0.5
init.sigma_c = 0.5
init.sigma_omega = 0.5
time.t_end = 1.0
time.dt_max = 0.02
time.checkpoint_every = 0.5
diag.fit_t1 = 0.2
diag.fit_t2 = 1.0
"""


def tiny_config(extra=""):
    return parse_config(TINY + extra)


class TestCsvColumns:
    def test_default_schema(self):
        cfg = parse_config("")
        assert csv_columns(cfg) == [
            "t", "mass", "circulation", "min_n", "max_c",
            "n_L1", "n_Linf", "grad_n_Linf", "grad_c_Linf", "grad2_c_Linf",
            "n_L2", "grad_c_L4", "omega_L2", "grad_omega_L1.5",
            "prof_n", "prof_omega", "prof_gradc",
        ]

    def test_duplicates_collapse(self):
        # exponents that collide with the fixed block appear only once
        cfg = parse_config("diag.p_list = 1, 2\ndiag.omega_r_list = 2, 2")
        cols = csv_columns(cfg)
        assert cols.count("n_L1") == 1
        assert cols.count("omega_L2") == 1
        assert "n_L2" in cols


class TestTimeseriesCsv:
    def test_file_layout_and_determinism(self, tmp_path):
        cfg = tiny_config()
        a, b = tmp_path / "a", tmp_path / "b"
        simulate(cfg, outdir=a)
        simulate(cfg, outdir=b)
        text = (a / "timeseries.csv").read_text()
        lines = text.strip().split("\n")
        assert lines[0] == ",".join(csv_columns(cfg))
        assert len(lines) == 1 + 3  # header + checkpoints at t = 0, 0.5, 1
        for line in lines[1:]:
            values = line.split(",")
            assert len(values) == len(csv_columns(cfg))
            for v in values:
                float(v)  # every cell is scientific notation
        assert text == (b / "timeseries.csv").read_text()

    def test_snapshots_written_and_consistent(self, tmp_path):
        cfg = tiny_config("output.snapshots = true\noutput.snapshot_every = 0.5")
        simulate(cfg, outdir=tmp_path)
        for stem in ("n", "omega", "nref"):
            assert (tmp_path / f"{stem}_t0.500000.snap").exists()
            assert (tmp_path / f"{stem}_t1.000000.snap").exists()
        snap = read_snapshot(tmp_path / "nref_t1.000000.snap")
        grid = GridSpec(64, 10.0)
        ref = cfg.init.m * heat_kernel(grid, 1.0, (5.0, 5.0)).values
        assert np.max(np.abs(snap.field.values - ref)) <= 1e-14


def power_law_series(cfg, slopes, prof_slopes):
    """Checkpoint series whose columns follow exact power laws A t^s."""
    series = TimeSeries(metadata={"config": cfg})
    for t in np.arange(0.0, cfg.time.t_end + 0.5, 1.0):
        tt = max(t, 1.0)  # t = 0 row never enters a fit window or trend
        norms = {q: 2.0 * tt**s for q, s in slopes.items()}
        profile = {q: 3.0 * tt**s for q, s in prof_slopes.items()}
        series.append(CheckpointRecord(
            t=float(t), mass=0.5, circulation=0.5, min_n=0.0, max_c=0.1,
            norms=norms, profile=profile,
        ))
    return series


DEFAULT_QUANTITIES = (
    "n_Linf", "grad_c_Linf", "grad_n_Linf", "grad2_c_Linf",
    "omega_L2", "grad_omega_L1.5",
)


class TestDecayReport:
    def test_exact_rates_pass(self):
        cfg = parse_config("")
        slopes = {q: paper_slope(q) for q in DEFAULT_QUANTITIES}
        prof = {"prof_n": -0.5, "prof_omega": -0.5, "prof_gradc": -0.5}
        rows = {r.quantity: r for r in decay_report(power_law_series(cfg, slopes, prof), cfg)}
        assert set(rows) == set(DEFAULT_QUANTITIES) | set(prof)
        for q in DEFAULT_QUANTITIES:
            assert rows[q].fitted_slope == pytest.approx(paper_slope(q), abs=1e-10)
            assert rows[q].verdict == "pass"

    def test_off_band_rate_fails(self):
        cfg = parse_config("")
        slopes = {q: paper_slope(q) for q in DEFAULT_QUANTITIES}
        slopes["n_Linf"] = -0.5  # half the predicted rate: outside every band
        prof = {"prof_n": -0.5, "prof_omega": -0.5, "prof_gradc": -0.5}
        rows = {r.quantity: r for r in decay_report(power_law_series(cfg, slopes, prof), cfg)}
        assert rows["n_Linf"].verdict == "fail"
        assert rows["grad_n_Linf"].verdict == "pass"

    def test_zero_quantity_is_skipped(self):
        cfg = parse_config("")
        slopes = {q: paper_slope(q) for q in DEFAULT_QUANTITIES}
        prof = {"prof_n": -0.5, "prof_omega": -0.5, "prof_gradc": -0.5}
        series = TimeSeries(metadata={"config": cfg})
        for r in power_law_series(cfg, slopes, prof).records:
            norms = dict(r.norms, omega_L2=0.0)
            series.append(CheckpointRecord(
                t=r.t, mass=r.mass, circulation=r.circulation,
                min_n=r.min_n, max_c=r.max_c, norms=norms, profile=r.profile,
            ))
        rows = {r.quantity: r for r in decay_report(series, cfg)}
        assert rows["omega_L2"].verdict == "skip"
        assert math.isnan(rows["omega_L2"].fitted_slope)

    def test_data_class_gating(self):
        # a zero-circulation dipole decays faster than the predicted vortex
        # rate, so its omega rows report but do not assert
        cfg = parse_config("init.omega_family = dipole")
        slopes = {q: paper_slope(q) for q in DEFAULT_QUANTITIES}
        prof = {"prof_n": -0.5, "prof_omega": -0.5, "prof_gradc": -0.5}
        rows = {r.quantity: r for r in decay_report(power_law_series(cfg, slopes, prof), cfg)}
        assert rows["omega_L2"].verdict == "skip"
        assert rows["grad_omega_L1.5"].verdict == "skip"
        assert rows["n_Linf"].verdict == "pass"

        # spatially decaying initial oxygen relaxes faster than the uniform
        # background rate: the grad-c slope rows skip, the grad-c profile
        # trend asserts
        cfg2 = parse_config("init.c_family = gaussian")
        rows2 = {r.quantity: r for r in decay_report(power_law_series(cfg2, slopes, prof), cfg2)}
        assert rows2["grad_c_Linf"].verdict == "skip"
        assert rows2["grad2_c_Linf"].verdict == "skip"
        assert rows2["prof_gradc"].verdict == "pass"

    def test_profile_trend_verdicts(self):
        cfg = parse_config("")
        slopes = {q: paper_slope(q) for q in DEFAULT_QUANTITIES}
        prof = {"prof_n": -0.5, "prof_omega": 0.5, "prof_gradc": -0.5}
        rows = {r.quantity: r for r in decay_report(power_law_series(cfg, slopes, prof), cfg)}
        assert rows["prof_n"].verdict == "pass"        # decreasing
        assert rows["prof_omega"].verdict == "fail"    # increasing
        assert rows["prof_gradc"].verdict == "skip"    # uniform background

    def test_written_report(self, tmp_path):
        cfg = parse_config("")
        slopes = {q: paper_slope(q) for q in DEFAULT_QUANTITIES}
        prof = {"prof_n": -0.5, "prof_omega": -0.5, "prof_gradc": -0.5}
        rows = decay_report(power_law_series(cfg, slopes, prof), cfg)
        path = tmp_path / "decay_report.csv"
        write_decay_csv(path, rows)
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "quantity,fitted_slope,paper_slope,band,pass"
        assert len(lines) == 1 + len(rows)
        verdicts = {line.split(",")[-1] for line in lines[1:]}
        assert verdicts <= {"pass", "fail", "skip"}


class TestRescale:
    def test_tiny_rescale_check_passes(self):
        cfg = tiny_config("diag.p_list = 1, 2")
        report = run_rescale_check(cfg, 2)
        labels = [r.quantity for r in report.rows]
        assert labels == [
            "init_n_L1", "init_c0_sup", "init_omega_L1", "init_circulation",
            "curve_n_L1", "curve_n_L2",
        ]
        assert report.passed
        for row in report.rows[:4]:
            assert row.deviation <= 1e-8

    def test_misaligned_times_rejected(self):
        cfg = tiny_config()
        base = simulate(cfg)
        with pytest.raises(ValueError, match="align"):
            rescale_report(base, 2, base, cfg)


class TestCli:
    def test_print_config_round_trip(self, capsys):
        assert main(["print-config", "--config", "small_data.cfg"]) == 0
        text = capsys.readouterr().out
        cfg = parse_config(text)
        assert cfg.time.t_end == 50.0

    def test_unknown_config_name(self, capsys):
        assert main(["run", "--config", "no_such.cfg"]) == 1
        assert "config file not found" in capsys.readouterr().err

    def test_bad_config_text(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text("grid.n_points = 7\n")
        assert main(["run", "--config", str(bad)]) == 1
        assert "must be even" in capsys.readouterr().err

    def test_invalid_thread_cap(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("CFNS_THREADS", "many")
        assert main(["print-config"]) == 1
        assert "CFNS_THREADS" in capsys.readouterr().err

    def test_valid_thread_cap_is_accepted(self, monkeypatch):
        monkeypatch.setenv("CFNS_THREADS", "4")
        assert main(["print-config"]) == 0

    def test_run_writes_outputs(self, tmp_path, capsys):
        cfg_path = tmp_path / "tiny.cfg"
        cfg_path.write_text(TINY)
        out = tmp_path / "out"
        assert main(["run", "--config", str(cfg_path), "--out", str(out)]) == 0
        assert (out / "timeseries.csv").exists()

    def test_numerical_failure_exit_code(self, tmp_path, capsys):
        # an unresolvable initial bump trips the positivity guard: exit 2
        cfg_path = tmp_path / "under.cfg"
        cfg_path.write_text(
            "grid.n_points = 8\ngrid.box_length = 10.0\n"
            "init.sigma_n = 0.5\ninit.sigma_c = 0.5\ninit.sigma_omega = 0.5\n"
            "time.t_end = 1.0\n"
        )
        assert main(["run", "--config", str(cfg_path), "--out", str(tmp_path / "o")]) == 2
        assert "numerical failure" in capsys.readouterr().err

    def test_rescale_k_validation(self, capsys):
        assert main(["rescale-check", "--k", "0"]) == 1
        assert "--k" in capsys.readouterr().err
