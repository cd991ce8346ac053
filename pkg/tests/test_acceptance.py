"""Acceptance suite: one test (and one printed pass/fail line) per criterion.

The desk-scale runs (256 ** 2 grid, box length 100, horizon t = 50) are shared
through module-scoped fixtures; the whole suite takes roughly a quarter hour.
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest

from cfns.cli import main
from cfns.config import parse_config
from cfns.diagnostics import (
    decay_slope,
    radial_identity_check,
    smoothing_constant_probe,
)
from cfns.harness import build_problem, run_rescale_check, simulate
from cfns.integrator import StepControl, run, step
from cfns.kernels import heat_kernel, periodized_gaussian
from cfns.model import InitSpec, PotentialSpec, SensitivityPair, build_initial_state
from cfns.selftest import (
    _check_biot_savart,
    _check_round_trip,
    _check_semigroup,
)
from cfns.spectral import GridSpec, biot_savart, gradient, lp_norm

from importlib import resources


def _shipped(name):
    return parse_config(resources.files("cfns").joinpath("configs", name).read_text())


def _verdict(name, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


# ---------------------------------------------------------------------------
# shared desk-scale runs


@pytest.fixture(scope="module")
def small_data_run():
    """In-process run of the shipped small-data config.

    Returns (series, extrema, elapsed_seconds) where extrema tracks the
    pointwise bounds min n, max n, min c, max c at every checkpoint.
    """
    cfg = _shipped("small_data.cfg")
    grid, model, phi, init = build_problem(cfg)
    state0 = build_initial_state(grid, init)
    center = init.resolved_center(grid)
    from cfns.diagnostics import TimeSeries, compute_checkpoint

    series = TimeSeries(metadata={"config": cfg, "m": init.m, "gamma": init.total_circulation})
    extrema = {"min_n": [], "max_n": [], "min_c": [], "max_c": []}

    def sink(state):
        series.append(compute_checkpoint(
            state, m=init.m, gamma=init.total_circulation, center=center,
            p_list=cfg.diag.p_list, q_list=cfg.diag.q_list,
            omega_r_list=cfg.diag.omega_r_list,
            grad_omega_r_list=cfg.diag.grad_omega_r_list,
            ball_radius=cfg.diag.ball_radius, profile_r=cfg.diag.profile_r,
        ))
        extrema["min_n"].append(float(np.min(state.n.values)))
        extrema["max_n"].append(float(np.max(state.n.values)))
        extrema["min_c"].append(float(np.min(state.c.values)))
        extrema["max_c"].append(float(np.max(state.c.values)))

    ctrl = StepControl(dt_max=cfg.time.dt_max, t_end=cfg.time.t_end,
                       cfl=cfg.time.cfl, checkpoint_every=cfg.time.checkpoint_every)
    start = time.perf_counter()
    run(state0, ctrl, model, phi, sink)
    elapsed = time.perf_counter() - start
    return series, {k: np.array(v) for k, v in extrema.items()}, elapsed


@pytest.fixture(scope="module")
def profile_trends_series():
    return simulate(_shipped("profile_trends.cfg"))


# ---------------------------------------------------------------------------
# criteria


def test_spectral_core_suite():
    start = time.perf_counter()
    worst = 0.0
    for check in (_check_round_trip, _check_biot_savart, _check_semigroup):
        value, tol = check()
        assert tol == 1e-12
        worst = max(worst, value)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and elapsed < 10.0
    _verdict("spectral core suite",
             ok, f"worst residual {worst:.3e} (tol 1e-12), {elapsed:.1f}s (< 10s)")


def test_pure_heat_oracle():
    cfg = _shipped("pure_heat.cfg")
    grid, model, phi, init = build_problem(cfg)
    state0 = build_initial_state(grid, init)
    center = init.resolved_center(grid)
    t0 = init.sigma_n**2 / 2.0
    probes = {}

    def sink(state):
        if any(abs(state.t - t) <= 1e-12 for t in (1.0, 10.0, 50.0)):
            exact = init.m * heat_kernel(grid, state.t + t0, center).values
            probes[state.t] = float(np.max(np.abs(state.n.values - exact)) / np.max(exact))

    ctrl = StepControl(dt_max=cfg.time.dt_max, t_end=cfg.time.t_end,
                       cfl=cfg.time.cfl, checkpoint_every=cfg.time.checkpoint_every)
    start = time.perf_counter()
    run(state0, ctrl, model, phi, sink)
    elapsed = time.perf_counter() - start
    worst = max(probes.values())
    ok = set(probes) == {1.0, 10.0, 50.0} and worst <= 1e-8 and elapsed < 60.0
    _verdict("pure-heat oracle",
             ok, f"worst sup-relative error {worst:.3e} (tol 1e-8), {elapsed:.1f}s (< 60s)")


def test_conservation_and_bounds(small_data_run):
    series, extrema, _ = small_data_run
    m = series.metadata["m"]
    gamma = series.metadata["gamma"]
    mass_dev = float(np.max(np.abs(series.column("mass") - m)) / m)
    circ_dev = float(np.max(np.abs(series.column("circulation") - gamma)) / abs(gamma))
    # non-increasing max c, up to float noise (measured uptick: a few ulps)
    c_uptick = float(np.max(np.diff(extrema["max_c"]), initial=0.0))
    c_ok = c_uptick <= 1e-15 * extrema["max_c"][0]
    min_c = float(np.min(extrema["min_c"]))
    n_floor = float(np.min(extrema["min_n"] + 1e-10 * extrema["max_n"]))
    ok = mass_dev <= 1e-8 and circ_dev <= 1e-8 and c_ok and min_c >= -1e-10 and n_floor >= 0.0
    _verdict(
        "conservation", ok,
        f"mass dev {mass_dev:.2e}, circulation dev {circ_dev:.2e} (tol 1e-8), "
        f"max-c uptick {c_uptick:.2e}, min c {min_c:.2e} (>= -1e-10), "
        f"min n floor margin {n_floor:.2e}",
    )


def test_decay_slope_bands(small_data_run):
    series, _, elapsed = small_data_run
    bands = {
        "n_Linf": (-1.0, 0.15),
        "grad_c_Linf": (-0.5, 0.15),
        "omega_L2": (-0.5, 0.15),
        "grad_n_Linf": (-1.5, 0.2),
        "grad2_c_Linf": (-1.0, 0.2),
        "grad_omega_L1.5": (-(1.5 - 2.0 / 3.0), 0.2),
    }
    details = []
    ok = elapsed < 300.0
    for quantity, (target, band) in bands.items():
        slope, _, _ = decay_slope(series, quantity, (5.0, 50.0))
        inside = abs(slope - target) <= band
        ok = ok and inside
        details.append(f"{quantity} {slope:+.3f} (target {target:+.3f} +/- {band})")
    _verdict("decay slope bands", ok, f"{'; '.join(details)}; run {elapsed:.0f}s (< 300s)")


def test_profile_trends(profile_trends_series):
    series = profile_trends_series
    ts = series.times()
    idx = [int(np.argmin(np.abs(ts - t))) for t in (10.0, 20.0, 40.0)]
    details = []
    ok = True
    for prof in ("prof_n", "prof_omega", "prof_gradc"):
        vals = series.column(prof)[idx]
        decreasing = bool(np.all(np.isfinite(vals)) and np.all(np.diff(vals) < 0))
        ok = ok and decreasing
        details.append(f"{prof} " + " > ".join(f"{v:.3e}" for v in vals))
    _verdict("profile trends", ok, "; ".join(details))


def test_rescale_check():
    report = run_rescale_check(_shipped("rescale_base.cfg"), 2)
    worst_inv = max(r.deviation for r in report.rows if r.quantity.startswith("init_"))
    worst_curve = max(r.deviation for r in report.rows if r.quantity.startswith("curve_"))
    ok = report.passed and worst_inv <= 1e-8 and worst_curve <= 2e-2
    _verdict("rescale check (k=2)", ok,
             f"invariants {worst_inv:.2e} (tol 1e-8), curves {worst_curve:.2e} (tol 2e-2)")


def test_radial_identity():
    grid = GridSpec(1024, 512.0)
    mid = grid.box_length / 2.0
    g = periodized_gaussian(grid, 1.0**2, (mid, mid))
    f = periodized_gaussian(grid, 2.0**2, (mid, mid))
    residual = radial_identity_check(grid, g, f)
    u = biot_savart(g)
    scale = lp_norm(u.magnitude(), math.inf) * lp_norm(gradient(f).magnitude(), math.inf)
    rel = residual / scale
    _verdict("radial identity", rel <= 1e-8, f"sup residual {rel:.3e} x scale (tol 1e-8)")


def test_smoothing_probe():
    grid = GridSpec(1024, 51.2)
    mid = grid.box_length / 2.0
    u0 = periodized_gaussian(grid, 0.2**2, (mid, mid))
    ts = np.geomspace(0.1, 10.0, 12)
    details = []
    ok = True
    for combo in ((math.inf, 1.0, 0), (2.0, 1.0, 0), (math.inf, 1.0, 1)):
        result = smoothing_constant_probe(grid, u0, combo, ts)
        ok = ok and abs(result.slope) <= 0.1
        details.append(f"(q={combo[0]:g}, r={combo[1]:g}, a={combo[2]}) slope {result.slope:+.4f}")
    _verdict("smoothing probe", ok, f"{'; '.join(details)} (tol +/- 0.1)")


def test_self_convergence_order():
    grid = GridSpec(64, 10.0)
    model = SensitivityPair(chi0=0.1, kappa=0.1)
    phi = PotentialSpec(family="gaussian_well", amplitude=0.05, center=(6.0, 5.0), width=1.0)
    state0 = build_initial_state(
        grid, InitSpec(m=0.5, sigma_n=0.5, c_bar=0.1, gamma=0.5, sigma_omega=0.5))
    results = []
    for nsteps in (20, 40, 80):
        state = state0
        for _ in range(nsteps):
            state = step(state, 1.0 / nsteps, model, phi)
        results.append(state)
    errs = []
    for a, b in ((results[0], results[1]), (results[1], results[2])):
        errs.append(max(
            np.max(np.abs(a.n.values - b.n.values)),
            np.max(np.abs(a.c.values - b.c.values)),
            np.max(np.abs(a.omega.values - b.omega.values)),
        ))
    order = math.log2(errs[0] / errs[1])
    _verdict("self-convergence order", order >= 1.8, f"Richardson order {order:.3f} (>= 1.8)")


def test_determinism(tmp_path_factory):
    base = tmp_path_factory.mktemp("determinism")
    first, second = base / "first", base / "second"
    rc1 = main(["run", "--config", "small_data.cfg", "--out", str(first)])
    rc2 = main(["run", "--config", "small_data.cfg", "--out", str(second)])
    a = (first / "timeseries.csv").read_bytes()
    b = (second / "timeseries.csv").read_bytes()
    ok = rc1 == 0 and rc2 == 0 and a == b
    _verdict("determinism", ok,
             f"exit codes {rc1}/{rc2}, timeseries.csv byte-identical: {a == b}")
