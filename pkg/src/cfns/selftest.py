"""Built-in property suite behind `cfns selftest`.

Each check is independent of the simulation path it validates: transforms
are checked by round-trip, the Biot-Savart inversion by its divergence/curl
identities, the stepper's linear part against the exact semigroup, the full
pure-heat run against the closed-form periodized kernel, and conservation
against the initial integrals.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .config import RunConfig, GridSection, InitSection, ModelSection, TimeSection
from .diagnostics import radial_identity_check, smoothing_constant_probe
from .harness import simulate
from .kernels import heat_kernel, periodized_gaussian
from .model import InitSpec, build_initial_state
from .spectral import (
    GridSpec,
    RealField,
    biot_savart,
    divergence,
    forward_transform,
    gradient,
    heat_propagator,
    inverse_transform,
    lp_norm,
)

__all__ = ["SelfTestResult", "run_selftest"]


@dataclass(frozen=True)
class SelfTestResult:
    name: str
    value: float
    tolerance: float
    passed: bool
    seconds: float


def _smooth_random_field(grid: GridSpec, seed: int) -> RealField:
    """Band-limited random field: white noise pushed through a short heat flow."""
    rng = np.random.default_rng(seed)
    noise = RealField(grid, rng.standard_normal((grid.n_points, grid.n_points)))
    return heat_propagator(noise, (4.0 * grid.spacing) ** 2)


def _check_round_trip() -> tuple[float, float]:
    grid = GridSpec(256, 100.0)
    f = _smooth_random_field(grid, seed=1)
    g = inverse_transform(forward_transform(f))
    err = float(np.max(np.abs(g.values - f.values)) / np.max(np.abs(f.values)))
    return err, 1e-12


def _check_biot_savart() -> tuple[float, float]:
    grid = GridSpec(256, 100.0)
    worst = 0.0
    for seed in range(20):
        w = _smooth_random_field(grid, seed=100 + seed)
        u = biot_savart(w)
        scale = max(float(np.max(np.abs(w.values))), 1e-30)
        div = float(np.max(np.abs(divergence(u).values))) / scale
        gx = gradient(u.y).x.values
        gy = gradient(u.x).y.values
        curl = gx - gy
        target = w.values - np.mean(w.values)
        curl_err = float(np.max(np.abs(curl - target))) / scale
        worst = max(worst, div, curl_err)
    return worst, 1e-12


def _check_semigroup() -> tuple[float, float]:
    grid = GridSpec(256, 100.0)
    f = _smooth_random_field(grid, seed=7)
    a = heat_propagator(heat_propagator(f, 0.7), 1.3)
    b = heat_propagator(f, 2.0)
    err = float(np.max(np.abs(a.values - b.values)) / np.max(np.abs(b.values)))
    return err, 1e-12


def _check_radial_identity() -> tuple[float, float]:
    grid = GridSpec(1024, 512.0)
    mid = grid.box_length / 2.0
    g = periodized_gaussian(grid, 1.0**2, (mid, mid))
    f = periodized_gaussian(grid, 2.0**2, (mid, mid))
    residual = radial_identity_check(grid, g, f)
    u = biot_savart(g)
    scale = lp_norm(u.magnitude(), math.inf) * lp_norm(gradient(f).magnitude(), math.inf)
    return residual / scale, 1e-8


def _check_smoothing_probe() -> tuple[float, float]:
    grid = GridSpec(1024, 51.2)
    mid = grid.box_length / 2.0
    u0 = periodized_gaussian(grid, 0.2**2, (mid, mid))
    ts = np.geomspace(0.1, 10.0, 12)
    worst = 0.0
    for combo in ((math.inf, 1.0, 0), (2.0, 1.0, 0), (math.inf, 1.0, 1)):
        result = smoothing_constant_probe(grid, u0, combo, ts)
        worst = max(worst, abs(result.slope))
    return worst, 0.1


def _pure_heat_config(t_end: float) -> RunConfig:
    return RunConfig(
        grid=GridSection(n_points=256, box_length=100.0),
        model=ModelSection(chi0=0.0, kappa=0.0),
        init=InitSection(m=0.5, gamma=0.0, c_bar=0.0),
        time=TimeSection(t_end=t_end, dt_max=0.5, checkpoint_every=max(1.0, t_end / 10)),
    )


def _check_pure_heat() -> tuple[float, float]:
    cfg = _pure_heat_config(t_end=10.0)
    grid = GridSpec(cfg.grid.n_points, cfg.grid.box_length)
    init = InitSpec(m=cfg.init.m, sigma_n=cfg.init.sigma_n, gamma=0.0, c_bar=0.0)
    state = build_initial_state(grid, init)
    from .integrator import StepControl, run
    from .model import PotentialSpec, SensitivityPair

    final = run(
        state,
        StepControl(dt_max=0.5, t_end=10.0, checkpoint_every=10.0),
        SensitivityPair(chi0=0.0, kappa=0.0),
        PotentialSpec(),
        lambda s: None,
    )
    t0 = cfg.init.sigma_n**2 / 2.0
    center = init.resolved_center(grid)
    exact = cfg.init.m * heat_kernel(grid, 10.0 + t0, center).values
    err = float(np.max(np.abs(final.n.values - exact)) / np.max(exact))
    return err, 1e-8


def _check_conservation() -> tuple[float, float]:
    cfg = RunConfig(time=TimeSection(t_end=5.0, dt_max=0.05, checkpoint_every=1.0))
    series = simulate(cfg)
    m = series.metadata["m"]
    gamma = series.metadata["gamma"]
    worst = 0.0
    for record in series.records:
        worst = max(worst, abs(record.mass - m) / m)
        worst = max(worst, abs(record.circulation - gamma) / abs(gamma))
    return worst, 1e-8


_CHECKS = [
    ("transform round-trip", _check_round_trip),
    ("biot-savart identities", _check_biot_savart),
    ("heat semigroup", _check_semigroup),
    ("radial identity", _check_radial_identity),
    ("smoothing probe", _check_smoothing_probe),
    ("pure-heat oracle", _check_pure_heat),
    ("conservation", _check_conservation),
]


def run_selftest() -> list[SelfTestResult]:
    results = []
    for name, check in _CHECKS:
        start = time.perf_counter()
        value, tol = check()
        elapsed = time.perf_counter() - start
        results.append(SelfTestResult(name, value, tol, value <= tol, elapsed))
    return results
