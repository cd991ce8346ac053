"""Decay-law measurements on checkpoints.

Conserved integrals, L^p norms of the six decaying quantities, weighted
space-time norms, log-log decay-exponent fits, distances to the heat-kernel
profiles over parabolic balls, the rescaling-invariance comparison, the
radial-function identity check and the heat-semigroup smoothing probe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .kernels import heat_kernel
from .model import SimState
from .spectral import GridSpec, RealField, biot_savart, gradient, heat_propagator, lp_norm

__all__ = [
    "CheckpointRecord",
    "TimeSeries",
    "format_exponent",
    "compute_checkpoint",
    "weighted_norm",
    "decay_slope",
    "profile_distance",
    "radial_identity_check",
    "smoothing_constant_probe",
    "SmoothingProbeResult",
    "PAPER_SLOPES",
    "paper_slope",
]


def format_exponent(p: float) -> str:
    """Column-name spelling of a norm exponent: 2 -> '2', 1.5 -> '1.5', inf -> 'inf'."""
    if math.isinf(p):
        return "inf"
    if float(p).is_integer():
        return str(int(p))
    return repr(float(p))


# Predicted large-time decay exponents of the plain (unweighted) norms.
PAPER_SLOPES = {
    "n_Linf": -1.0,
    "grad_n_Linf": -1.5,
    "grad_c_Linf": -0.5,
    "grad2_c_Linf": -1.0,
}


def paper_slope(quantity: str) -> float:
    """Predicted decay exponent of a labeled quantity."""
    if quantity in PAPER_SLOPES:
        return PAPER_SLOPES[quantity]
    base, _, exp = quantity.rpartition("_L")
    r = float(exp)
    if base in ("n", "omega"):
        return -(1.0 - 1.0 / r)
    if base == "grad_omega":
        return -(1.5 - 1.0 / r)
    if base == "grad_c":
        return -(0.5 - 1.0 / r)
    raise KeyError(quantity)


@dataclass(frozen=True)
class CheckpointRecord:
    """Diagnostics of one checkpoint: conserved integrals, norms, profiles."""

    t: float
    mass: float
    circulation: float
    min_n: float
    max_c: float
    norms: dict[str, float]
    profile: dict[str, float]


@dataclass
class TimeSeries:
    """Ordered checkpoint records plus run metadata."""

    records: list[CheckpointRecord] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def append(self, record: CheckpointRecord) -> None:
        if self.records and record.t <= self.records[-1].t:
            raise ValueError("checkpoint times must be strictly increasing")
        self.records.append(record)

    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.records])

    def column(self, label: str) -> np.ndarray:
        out = []
        for r in self.records:
            if label == "mass":
                out.append(r.mass)
            elif label == "circulation":
                out.append(r.circulation)
            elif label in r.norms:
                out.append(r.norms[label])
            elif label in r.profile:
                out.append(r.profile[label])
            else:
                raise KeyError(f"no diagnostic column {label!r}")
        return np.array(out)


def _integral(f: RealField) -> float:
    return float(np.sum(f.values) * f.grid.spacing**2)


def _magnitude_norms(grid: GridSpec, mag: np.ndarray, exponents: Iterable[float]) -> dict[float, float]:
    f = RealField(grid, mag)
    return {p: lp_norm(f, p) for p in exponents}


def _ball_mask(grid: GridSpec, center: tuple[float, float], radius: float) -> np.ndarray:
    """Grid points strictly inside the ball, with periodic wrap-around distance."""
    L = grid.box_length
    dx = np.abs(grid.x - center[0])
    dx = np.minimum(dx, L - dx)
    dy = np.abs(grid.x - center[1])
    dy = np.minimum(dy, L - dy)
    return dx[:, None] ** 2 + dy[None, :] ** 2 < radius**2


def profile_distance(
    state: SimState,
    which: str,
    R: float,
    r: float = 2.0,
    center: tuple[float, float] | None = None,
    amount: float = 1.0,
) -> float:
    """Weighted distance to the self-similar profile over the parabolic ball.

    which = "n":      t * sup_{|x| < R sqrt(t)} |n - amount * Gamma(t)|
    which = "omega":  t^{1 - 1/r} ||omega - amount * Gamma(t)||_{L^r(ball)}
    which = "grad_c": t^{1/2} * sup_{ball} |grad c|

    Gamma is the truncated-image periodized heat kernel; the ball is centered
    at the initial bump's center. amount is the conserved integral (m or the
    circulation); it is ignored for "grad_c".
    """
    grid = state.grid
    t = state.t
    if t <= 0:
        raise ValueError("profile distance requires t > 0")
    radius = R * math.sqrt(t)
    if radius > grid.box_length / 4.0:
        raise ValueError(
            f"parabolic ball radius {radius:g} exceeds L/4; diffusion has saturated the box"
        )
    if center is None:
        mid = grid.box_length / 2.0
        center = (mid, mid)
    mask = _ball_mask(grid, center, radius)
    if not mask.any():
        return 0.0

    if which == "grad_c":
        gc = gradient(state.c)
        mag = np.hypot(gc.x.values, gc.y.values)
        return math.sqrt(t) * float(np.max(mag[mask]))

    gamma_vals = heat_kernel(grid, t, center).values
    if which == "n":
        diff = np.abs(state.n.values - amount * gamma_vals)
        return t * float(np.max(diff[mask]))
    if which == "omega":
        diff = np.abs(state.omega.values - amount * gamma_vals)
        if math.isinf(r):
            dist = float(np.max(diff[mask]))
            return t * dist
        dist = float((np.sum(diff[mask] ** r) * grid.spacing**2) ** (1.0 / r))
        return t ** (1.0 - 1.0 / r) * dist
    raise ValueError(f"unknown profile selector {which!r}")


def compute_checkpoint(
    state: SimState,
    m: float,
    gamma: float,
    center: tuple[float, float],
    p_list: Sequence[float] = (2.0,),
    q_list: Sequence[float] = (4.0,),
    omega_r_list: Sequence[float] = (2.0,),
    grad_omega_r_list: Sequence[float] = (1.5,),
    ball_radius: float = 2.0,
    profile_r: float = 2.0,
) -> CheckpointRecord:
    """Evaluate every configured diagnostic on one state."""
    g = state.grid
    norms: dict[str, float] = {}

    norms["n_L1"] = lp_norm(state.n, 1.0)
    norms["n_Linf"] = lp_norm(state.n, math.inf)
    for p in p_list:
        norms[f"n_L{format_exponent(p)}"] = lp_norm(state.n, p)

    gn = gradient(state.n)
    gn_mag = np.hypot(gn.x.values, gn.y.values)
    norms["grad_n_Linf"] = float(np.max(gn_mag))
    norms["grad_n_L2"] = lp_norm(RealField(g, gn_mag), 2.0)

    gc = gradient(state.c)
    gc_mag = np.hypot(gc.x.values, gc.y.values)
    norms["grad_c_Linf"] = float(np.max(gc_mag))
    for q in q_list:
        norms[f"grad_c_L{format_exponent(q)}"] = lp_norm(RealField(g, gc_mag), q)

    # Hessian of c via second derivatives of the gradient components.
    ch = np.fft.fft2(state.c.values)
    cxx = np.fft.ifft2(g.deriv_x * g.deriv_x * ch).real
    cxy = np.fft.ifft2(g.deriv_x * g.deriv_y * ch).real
    cyy = np.fft.ifft2(g.deriv_y * g.deriv_y * ch).real
    hess_mag = np.sqrt(cxx**2 + 2.0 * cxy**2 + cyy**2)
    norms["grad2_c_Linf"] = float(np.max(hess_mag))

    norms["omega_L1"] = lp_norm(state.omega, 1.0)
    for r in omega_r_list:
        norms[f"omega_L{format_exponent(r)}"] = lp_norm(state.omega, r)

    gw = gradient(state.omega)
    gw_mag = np.hypot(gw.x.values, gw.y.values)
    for r in grad_omega_r_list:
        norms[f"grad_omega_L{format_exponent(r)}"] = lp_norm(RealField(g, gw_mag), r)

    profile: dict[str, float] = {}
    if state.t > 0 and ball_radius * math.sqrt(state.t) <= g.box_length / 4.0:
        profile["prof_n"] = profile_distance(state, "n", ball_radius, center=center, amount=m)
        profile["prof_omega"] = profile_distance(
            state, "omega", ball_radius, r=profile_r, center=center, amount=gamma
        )
        profile["prof_gradc"] = profile_distance(state, "grad_c", ball_radius, center=center)
    elif state.t == 0:
        # The t-power weights vanish at t = 0; record the limit value.
        profile = {"prof_n": 0.0, "prof_omega": 0.0, "prof_gradc": 0.0}
    else:
        profile = {"prof_n": math.nan, "prof_omega": math.nan, "prof_gradc": math.nan}

    return CheckpointRecord(
        t=state.t,
        mass=_integral(state.n),
        circulation=_integral(state.omega),
        min_n=float(np.min(state.n.values)),
        max_c=float(np.max(state.c.values)),
        norms=norms,
        profile=profile,
    )


_WEIGHT_FAMILIES: dict[str, tuple[str, Callable[[float], float]]] = {
    # family -> (column prefix, exponent -> time weight)
    "K_p": ("n", lambda p: 1.0 - 1.0 / p),
    "N_q": ("grad_c", lambda q: 0.5 - (0.0 if math.isinf(q) else 1.0 / q)),
    "K_r": ("omega", lambda r: 1.0 - 1.0 / r),
    "K1_inf_n": ("grad_n", lambda _: 1.5),
    "K_inf_c2": ("grad2_c", lambda _: 1.0),
    "K1_r": ("grad_omega", lambda r: 1.5 - 1.0 / r),
}


def weighted_norm(series: TimeSeries, family: str, exponent: float, t_min: float) -> float:
    """Discrete sup over checkpoints t >= t_min of t^w ||.||_exponent."""
    if family not in _WEIGHT_FAMILIES:
        raise ValueError(f"unknown weighted-norm family {family!r}")
    prefix, weight_of = _WEIGHT_FAMILIES[family]
    if family in ("K1_inf_n", "K_inf_c2"):
        label = f"{prefix}_Linf"
    else:
        label = f"{prefix}_L{format_exponent(exponent)}"
    w = weight_of(exponent)
    ts = series.times()
    keep = ts >= t_min
    if not keep.any():
        raise ValueError(f"no checkpoints at or after t_min = {t_min:g}")
    values = series.column(label)[keep]
    return float(np.max(ts[keep] ** w * values))


def decay_slope(
    series: TimeSeries, quantity: str, window: tuple[float, float]
) -> tuple[float, float, float]:
    """Least-squares line through (log t, log value) over the time window.

    Returns (slope, intercept, rms residual). Requires at least 8 checkpoints
    in the window and strictly positive values.
    """
    t1, t2 = window
    ts = series.times()
    keep = (ts >= t1) & (ts <= t2) & (ts > 0)
    if int(np.sum(keep)) < 8:
        raise ValueError(f"fewer than 8 checkpoints in window [{t1:g}, {t2:g}]")
    values = series.column(quantity)[keep]
    if np.any(values <= 0):
        raise ValueError(f"nonpositive values of {quantity!r} in the fit window")
    x = np.log(ts[keep])
    y = np.log(values)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid**2)))


def radial_identity_check(grid: GridSpec, g: RealField, f: RealField) -> float:
    """sup |(K * g) . grad f| for fields radial about the box center.

    For radial g the Biot-Savart velocity is azimuthal while grad f is radial,
    so the advection of f by K * g vanishes identically; the returned value
    measures the discrete residual. Non-radial inputs are rejected.
    """
    for name, fld in (("g", g), ("f", f)):
        _require_radial(fld, name)
    u = biot_savart(g)
    gf = gradient(f)
    dot = u.x.values * gf.x.values + u.y.values * gf.y.values
    return float(np.max(np.abs(dot)))


def _require_radial(f: RealField, name: str) -> None:
    v = f.values
    scale = float(np.max(np.abs(v))) or 1.0
    # Reflections about the box center (x -> L - x per axis) and the diagonal
    # swap: a field radial about the center is invariant under all three.
    refl_x = np.roll(v[::-1, :], 1, axis=0)
    refl_y = np.roll(v[:, ::-1], 1, axis=1)
    for sym in (refl_x, refl_y, v.T):
        if np.max(np.abs(v - sym)) > 1e-12 * scale:
            raise ValueError(f"field {name!r} is not radial about the box center")


@dataclass(frozen=True)
class SmoothingProbeResult:
    """Measured heat-semigroup smoothing constants over a list of times."""

    q: float
    r: float
    derivative_order: int
    times: tuple[float, ...]
    ratios: tuple[float, ...]
    slope: float


def smoothing_constant_probe(
    grid: GridSpec,
    u0: RealField,
    combo: tuple[float, float, int],
    t_list: Sequence[float],
) -> SmoothingProbeResult:
    """Ratios ||grad^a e^{t Lap} u0||_q / (t^{-(1/r - 1/q) - a/2} ||u0||_r).

    If the heat-kernel estimate holds with a t-independent constant, the
    log-log slope of the ratio sequence is zero.
    """
    q, r, alpha = combo
    if alpha not in (0, 1):
        raise ValueError("derivative order must be 0 or 1")
    t_sat = grid.saturation_time
    ts = sorted(float(t) for t in t_list)
    if not ts or ts[0] <= 0:
        raise ValueError("probe times must be positive")
    if ts[-1] > t_sat:
        raise ValueError(f"probe time {ts[-1]:g} is beyond the saturation time {t_sat:g}")

    denom_norm = lp_norm(u0, r)
    exponent = -((1.0 / r if not math.isinf(r) else 0.0)
                 - (1.0 / q if not math.isinf(q) else 0.0)) - alpha / 2.0
    ratios = []
    for t in ts:
        ft = heat_propagator(u0, t)
        if alpha == 1:
            gf = gradient(ft)
            value = lp_norm(RealField(grid, np.hypot(gf.x.values, gf.y.values)), q)
        else:
            value = lp_norm(ft, q)
        ratios.append(value / (t**exponent * denom_norm))
    slope = float(np.polyfit(np.log(ts), np.log(ratios), 1)[0])
    return SmoothingProbeResult(
        q=q, r=r, derivative_order=alpha,
        times=tuple(ts), ratios=tuple(ratios), slope=slope,
    )
