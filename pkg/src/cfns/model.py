"""The coupled cell/oxygen/vorticity system.

Sensitivity and consumption function families, the gravitational potential,
initial-data construction, and evaluation of the non-Laplacian right-hand
sides of the three evolution equations:

    dn/dt     = Lap n  - div(u n) - div(chi(c) n grad c)
    dc/dt     = Lap c  - u . grad c - k(c) n
    domega/dt = Lap omega - div(u omega) + div(n perp_grad(phi))

with u recovered from omega by the mean-removed Biot-Savart inversion.
Advection and buoyancy are kept in divergence form so the spatial means of
the n and omega right-hand sides vanish identically, which is what makes
discrete mass and circulation conservation structural.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NumericsError, PositivityError
from .kernels import periodized_gaussian
from .spectral import (
    GridSpec,
    RealField,
    VectorField,
    _biot_savart_hat,
    biot_savart,
)

__all__ = [
    "SensitivityPair",
    "PotentialSpec",
    "InitSpec",
    "SimState",
    "build_initial_state",
    "nonlinear_rhs",
    "velocity",
]

POSITIVITY_TOL = 1e-10

_CHI_FAMILIES = ("constant", "linear")
_K_FAMILIES = ("linear", "saturating")


@dataclass(frozen=True)
class SensitivityPair:
    """Chemotactic sensitivity chi(c) and oxygen consumption rate k(c).

    Built-in families:
      chi: "constant"  chi(c) = chi0
           "linear"    chi(c) = chi0 * (1 + c)
      k:   "linear"     k(c) = kappa * c
           "saturating" k(c) = kappa * c / (1 + c)

    All built-ins satisfy chi, k, chi', k' >= 0 and k(0) = 0; this is
    re-checked by sampling on construction so a new family cannot silently
    break the sign hypotheses.
    """

    chi_family: str = "constant"
    chi0: float = 0.1
    k_family: str = "linear"
    kappa: float = 0.1
    c_max: float = 10.0

    def __post_init__(self) -> None:
        if self.chi_family not in _CHI_FAMILIES:
            raise ValueError(f"unknown chi family {self.chi_family!r}")
        if self.k_family not in _K_FAMILIES:
            raise ValueError(f"unknown k family {self.k_family!r}")
        c = np.linspace(0.0, self.c_max, 2001)
        samples = (self.chi(c), self.k(c), self.chi_prime(c), self.k_prime(c))
        if any(np.min(s) < -1e-12 for s in samples):
            raise ValueError("sensitivity pair violates the sign conditions")
        if abs(self.k(np.zeros(1))[0]) > 1e-12:
            raise ValueError("consumption rate must satisfy k(0) = 0")

    def chi(self, c: np.ndarray) -> np.ndarray:
        if self.chi_family == "constant":
            return np.full_like(c, self.chi0)
        return self.chi0 * (1.0 + c)

    def chi_prime(self, c: np.ndarray) -> np.ndarray:
        if self.chi_family == "constant":
            return np.zeros_like(c)
        return np.full_like(c, self.chi0)

    def k(self, c: np.ndarray) -> np.ndarray:
        if self.k_family == "linear":
            return self.kappa * c
        return self.kappa * c / (1.0 + c)

    def k_prime(self, c: np.ndarray) -> np.ndarray:
        if self.k_family == "linear":
            return np.full_like(c, self.kappa)
        return self.kappa / (1.0 + c) ** 2

    def chi_sup(self, c_bound: float) -> float:
        """Upper bound of chi on [0, c_bound]; used in the CFL speed."""
        return float(np.max(self.chi(np.array([0.0, c_bound]))))


@dataclass(frozen=True)
class PotentialSpec:
    """Time-independent potential phi.

    Families: "zero", and "gaussian_well"
    phi(x) = -amplitude * exp(-|x - center|^2 / (2 width^2)), periodized by
    the same truncated image sum as the initial data, so that phi is smooth
    on the torus and its analytic gradient matches the spectral one.
    """

    family: str = "zero"
    amplitude: float = 0.0
    center: tuple[float, float] = (0.0, 0.0)
    width: float = 1.0

    def __post_init__(self) -> None:
        if self.family not in ("zero", "gaussian_well"):
            raise ValueError(f"unknown potential family {self.family!r}")
        if self.family == "gaussian_well" and self.width <= 0:
            raise ValueError("potential width must be positive")

    @property
    def is_zero(self) -> bool:
        return self.family == "zero" or self.amplitude == 0.0

    def sample(self, grid: GridSpec) -> RealField:
        if self.is_zero:
            return RealField(grid, np.zeros((grid.n_points, grid.n_points)))
        base = periodized_gaussian(grid, self.width**2, self.center)
        return RealField(grid, -self.amplitude * 2.0 * np.pi * self.width**2 * base.values)

    def grad(self, grid: GridSpec) -> VectorField:
        """Analytic gradient, image-summed like :meth:`sample`."""
        n = grid.n_points
        gx = np.zeros((n, n))
        gy = np.zeros((n, n))
        if not self.is_zero:
            L = grid.box_length
            s2 = self.width**2
            for ix in (-1, 0, 1):
                dx = grid.x - self.center[0] + ix * L
                for iy in (-1, 0, 1):
                    dy = grid.x - self.center[1] + iy * L
                    bump = self.amplitude * np.exp(
                        -(dx[:, None] ** 2 + dy[None, :] ** 2) / (2.0 * s2)
                    )
                    gx += bump * dx[:, None] / s2
                    gy += bump * dy[None, :] / s2
        return VectorField(RealField(grid, gx), RealField(grid, gy))


@lru_cache(maxsize=8)
def _perp_grad_phi(phi: PotentialSpec, grid: GridSpec) -> tuple[np.ndarray, np.ndarray] | None:
    """(-d2 phi, d1 phi) sample arrays, or None for a zero potential."""
    if phi.is_zero:
        return None
    g = phi.grad(grid)
    return -g.y.values, g.x.values


@dataclass(frozen=True)
class InitSpec:
    """Initial-data family: Gaussian cell bump, oxygen background, vortex.

    For omega_family "dipole" the field is an antisymmetric pair of lobes
    separated by dipole_separation along x1; gamma is then the circulation
    of the positive lobe and the total circulation is exactly zero.
    """

    m: float = 0.5
    sigma_n: float = 1.0
    c_family: str = "constant"
    c_bar: float = 0.1
    sigma_c: float = 1.0
    omega_family: str = "gaussian"
    gamma: float = 0.5
    sigma_omega: float = 1.0
    dipole_separation: float = 4.0
    center: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.m < 0 or self.c_bar < 0:
            raise ValueError("m and c_bar must be non-negative")
        if self.c_family not in ("constant", "gaussian"):
            raise ValueError(f"unknown c0 family {self.c_family!r}")
        if self.omega_family not in ("gaussian", "dipole"):
            raise ValueError(f"unknown omega0 family {self.omega_family!r}")

    def resolved_center(self, grid: GridSpec) -> tuple[float, float]:
        if self.center is not None:
            return self.center
        mid = grid.box_length / 2.0
        return (mid, mid)

    @property
    def total_circulation(self) -> float:
        return 0.0 if self.omega_family == "dipole" else self.gamma


@dataclass(frozen=True)
class SimState:
    """The triple (n, c, omega) at one time, on one grid."""

    n: RealField
    c: RealField
    omega: RealField
    t: float

    def __post_init__(self) -> None:
        if not (self.n.grid == self.c.grid == self.omega.grid):
            raise ValueError("state fields must share a grid")
        if self.t < 0:
            raise ValueError("time must be non-negative")
        n_max = float(np.max(self.n.values))
        if n_max > 0 and float(np.min(self.n.values)) < -POSITIVITY_TOL * n_max:
            raise PositivityError(
                f"cell density fell below -{POSITIVITY_TOL:g} * max(n) at t={self.t:g}; "
                "the run is under-resolved"
            )
        c_max = float(np.max(self.c.values))
        if c_max > 0 and float(np.min(self.c.values)) < -POSITIVITY_TOL * c_max:
            raise PositivityError(f"oxygen concentration went negative at t={self.t:g}")

    @property
    def grid(self) -> GridSpec:
        return self.n.grid


def _normalized_bump(grid: GridSpec, total: float, sigma: float,
                     center: tuple[float, float]) -> np.ndarray:
    """Periodized Gaussian scaled so its grid quadrature is exactly `total`."""
    if total == 0.0:
        return np.zeros((grid.n_points, grid.n_points))
    vals = periodized_gaussian(grid, sigma**2, center).values
    vals = vals * (total / (np.sum(vals) * grid.spacing**2))
    return vals


def build_initial_state(grid: GridSpec, init: InitSpec) -> SimState:
    """Construct the t = 0 state; integrals of n and omega are exact."""
    max_width = grid.box_length / 16.0
    widths = [init.sigma_n, init.sigma_omega]
    if init.c_family == "gaussian":
        widths.append(init.sigma_c)
    if any(w > max_width for w in widths):
        raise ValueError(f"initial widths must not exceed L/16 = {max_width:g}")

    center = init.resolved_center(grid)
    n0 = _normalized_bump(grid, init.m, init.sigma_n, center)

    if init.c_family == "constant":
        c0 = np.full((grid.n_points, grid.n_points), init.c_bar)
    else:
        bump = periodized_gaussian(grid, init.sigma_c**2, center).values
        peak = np.max(bump)
        c0 = init.c_bar * bump / peak if peak > 0 else bump

    if init.omega_family == "gaussian":
        w0 = _normalized_bump(grid, init.gamma, init.sigma_omega, center)
    else:
        # Antisymmetric dipole: the negative lobe is an exact grid translate
        # of the positive one, so the discrete circulation cancels to
        # round-off.
        lobe = _normalized_bump(grid, init.gamma, init.sigma_omega, center)
        shift = max(1, round(init.dipole_separation / 2.0 / grid.spacing))
        w0 = np.roll(lobe, shift, axis=0) - np.roll(lobe, -shift, axis=0)

    return SimState(
        n=RealField(grid, n0),
        c=RealField(grid, c0),
        omega=RealField(grid, w0),
        t=0.0,
    )


def _check_finite_term(values: np.ndarray, term: str, t: float) -> None:
    if not np.all(np.isfinite(values)):
        raise NumericsError(f"non-finite values in term '{term}' at t={t:g}")


def _rhs_hat(
    grid: GridSpec,
    n: np.ndarray,
    c: np.ndarray,
    w: np.ndarray,
    model: SensitivityPair,
    phi: PotentialSpec,
    t: float = 0.0,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Spectral nonlinear right-hand sides plus the velocity samples.

    Returns (Nn_hat, Nc_hat, Nw_hat, ux, uy). Every physical-space product
    is dealiased by the 2/3 rule after transforming.
    """
    mask = grid.dealias_mask
    ch = np.fft.fft2(c)
    wh = np.fft.fft2(w)

    uxh, uyh = _biot_savart_hat(grid, wh)
    ux = np.fft.ifft2(uxh).real
    uy = np.fft.ifft2(uyh).real
    cx = np.fft.ifft2(grid.deriv_x * ch).real
    cy = np.fft.ifft2(grid.deriv_y * ch).real

    chi_n = model.chi(c) * n
    fx = ux * n + chi_n * cx
    fy = uy * n + chi_n * cy
    _check_finite_term(fx, "div(u n + chi(c) n grad c)", t)
    nn_hat = -(grid.deriv_x * np.fft.fft2(fx) + grid.deriv_y * np.fft.fft2(fy)) * mask

    reaction = model.k(c) * n
    nc = -(ux * cx + uy * cy) - reaction
    _check_finite_term(nc, "u . grad c + k(c) n", t)
    nc_hat = np.fft.fft2(nc) * mask

    gx = ux * w
    gy = uy * w
    pg = _perp_grad_phi(phi, grid)
    if pg is not None:
        gx -= n * pg[0]
        gy -= n * pg[1]
    _check_finite_term(gx, "div(u omega - n perp_grad phi)", t)
    nw_hat = -(grid.deriv_x * np.fft.fft2(gx) + grid.deriv_y * np.fft.fft2(gy)) * mask

    return nn_hat, nc_hat, nw_hat, ux, uy


def nonlinear_rhs(
    state: SimState, model: SensitivityPair, phi: PotentialSpec
) -> tuple[RealField, RealField, RealField]:
    """Non-Laplacian parts of the three equations, in physical space."""
    g = state.grid
    nn_hat, nc_hat, nw_hat, _, _ = _rhs_hat(
        g, state.n.values, state.c.values, state.omega.values, model, phi, state.t
    )
    return (
        RealField(g, np.fft.ifft2(nn_hat).real),
        RealField(g, np.fft.ifft2(nc_hat).real),
        RealField(g, np.fft.ifft2(nw_hat).real),
    )


def velocity(state: SimState) -> VectorField:
    """Biot-Savart velocity of the current vorticity."""
    return biot_savart(state.omega)
