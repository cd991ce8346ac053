"""Fourier machinery on a periodic square grid.

Transforms, spectral derivative multipliers, Biot-Savart inversion of the
vorticity, the exact heat propagator, 2/3-rule dealiasing and L^p norm
quadrature. Everything is built on numpy's complex FFT; all operations are
pure (inputs are never mutated).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "GridSpec",
    "RealField",
    "SpectralCoeffs",
    "VectorField",
    "forward_transform",
    "inverse_transform",
    "gradient",
    "perp_grad",
    "divergence",
    "biot_savart",
    "heat_propagator",
    "dealias",
    "lp_norm",
]


@dataclass(frozen=True)
class GridSpec:
    """Geometry and spectral bookkeeping of the periodic square [0, L)^2.

    Parameters
    ----------
    n_points : int
        Samples per axis; must be even and >= 8 (powers of two recommended).
    box_length : float
        Side length L of the periodic box, in physical length units.
    dealias_fraction : float
        Fraction of the Nyquist wavenumber retained by :func:`dealias`.
    """

    n_points: int
    box_length: float
    dealias_fraction: float = 2.0 / 3.0

    def __post_init__(self) -> None:
        if self.n_points < 8 or self.n_points % 2 != 0:
            raise ValueError("n_points must be even and >= 8")
        if not self.box_length > 0:
            raise ValueError("box_length must be positive")
        if not 0.0 < self.dealias_fraction <= 1.0:
            raise ValueError("dealias_fraction must lie in (0, 1]")

    @property
    def spacing(self) -> float:
        """Grid spacing h = L / N."""
        return self.box_length / self.n_points

    @cached_property
    def x(self) -> np.ndarray:
        """1D sample coordinates 0, h, ..., L - h."""
        return np.arange(self.n_points) * self.spacing

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """1D angular wavenumbers 2*pi/L * m, m in [-N/2, N/2)."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.spacing)

    @cached_property
    def kx(self) -> np.ndarray:
        k = self.wavenumbers
        return np.broadcast_to(k[:, None], (self.n_points, self.n_points))

    @cached_property
    def ky(self) -> np.ndarray:
        k = self.wavenumbers
        return np.broadcast_to(k[None, :], (self.n_points, self.n_points))

    @cached_property
    def k_squared(self) -> np.ndarray:
        return self.kx**2 + self.ky**2

    @cached_property
    def deriv_x(self) -> np.ndarray:
        """Multiplier i*k1 with the Nyquist mode zeroed (odd derivative)."""
        k = self.wavenumbers.copy()
        k[self.n_points // 2] = 0.0
        return 1j * np.broadcast_to(k[:, None], (self.n_points, self.n_points))

    @cached_property
    def deriv_y(self) -> np.ndarray:
        k = self.wavenumbers.copy()
        k[self.n_points // 2] = 0.0
        return 1j * np.broadcast_to(k[None, :], (self.n_points, self.n_points))

    @cached_property
    def inv_k_squared(self) -> np.ndarray:
        """1/|k|^2 with the zero mode set to zero (mean-removed inversion)."""
        k2 = self.k_squared.copy()
        k2[0, 0] = 1.0
        inv = 1.0 / k2
        inv[0, 0] = 0.0
        return inv

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """True where max(|m1|, |m2|) <= dealias_fraction * N/2 (integer modes)."""
        m = np.abs(np.fft.fftfreq(self.n_points) * self.n_points)
        cutoff = self.dealias_fraction * (self.n_points / 2)
        keep = m <= cutoff + 1e-12
        return keep[:, None] & keep[None, :]

    @property
    def saturation_time(self) -> float:
        """Time at which diffusion from a compact bump feels the boundary."""
        return (self.box_length / 8.0) ** 2 / 4.0


def _require_finite(values: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{what} contains non-finite values")


@dataclass(frozen=True)
class RealField:
    """Physical-space samples of a scalar field, values[i, j] = f(i*h, j*h)."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        n = self.grid.n_points
        if self.values.shape != (n, n):
            raise ValueError(f"values must have shape ({n}, {n})")
        _require_finite(self.values, "field")


@dataclass(frozen=True)
class SpectralCoeffs:
    """Fourier coefficients of a real field, indexed by wavevector.

    Hermitian symmetry (coeffs of k and -k conjugate) is enforced on
    construction so the inverse transform is real to round-off.
    """

    grid: GridSpec
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        n = self.grid.n_points
        if self.coeffs.shape != (n, n):
            raise ValueError(f"coeffs must have shape ({n}, {n})")
        _require_finite(self.coeffs.view(np.float64), "coefficients")
        mirrored = np.conj(_mirror(self.coeffs))
        scale = np.max(np.abs(self.coeffs)) or 1.0
        if np.max(np.abs(self.coeffs - mirrored)) > 1e-10 * scale:
            raise ValueError("coefficients are not Hermitian-symmetric")


def _mirror(c: np.ndarray) -> np.ndarray:
    """Coefficient array evaluated at -k."""
    return np.roll(np.flip(c, axis=(0, 1)), shift=(1, 1), axis=(0, 1))


@dataclass(frozen=True)
class VectorField:
    """Two scalar components (x1 and x2) on a shared grid."""

    x: RealField
    y: RealField

    def __post_init__(self) -> None:
        if self.x.grid != self.y.grid:
            raise ValueError("vector components must share a grid")

    @property
    def grid(self) -> GridSpec:
        return self.x.grid

    def magnitude(self) -> RealField:
        return RealField(self.grid, np.hypot(self.x.values, self.y.values))


def forward_transform(f: RealField) -> SpectralCoeffs:
    """Forward FFT of a real field."""
    return SpectralCoeffs(f.grid, np.fft.fft2(f.values))


def inverse_transform(c: SpectralCoeffs) -> RealField:
    """Inverse FFT; the imaginary residual (round-off) is discarded."""
    return RealField(c.grid, np.fft.ifft2(c.coeffs).real)


def gradient(f: RealField) -> VectorField:
    """Spectral gradient (d/dx1 f, d/dx2 f)."""
    g = f.grid
    fh = np.fft.fft2(f.values)
    fx = np.fft.ifft2(g.deriv_x * fh).real
    fy = np.fft.ifft2(g.deriv_y * fh).real
    return VectorField(RealField(g, fx), RealField(g, fy))


def perp_grad(f: RealField) -> VectorField:
    """Perpendicular gradient (-d/dx2 f, d/dx1 f)."""
    g = gradient(f)
    return VectorField(RealField(f.grid, -g.y.values), g.x)


def divergence(v: VectorField) -> RealField:
    """Spectral divergence of a vector field."""
    g = v.grid
    out = (
        np.fft.ifft2(g.deriv_x * np.fft.fft2(v.x.values)).real
        + np.fft.ifft2(g.deriv_y * np.fft.fft2(v.y.values)).real
    )
    return RealField(g, out)


def _biot_savart_hat(grid: GridSpec, omega_hat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Stream function psi solves Laplace psi = omega - mean(omega); u = perp_grad(psi).
    # Componentwise: u_hat = i (k2, -k1) omega_hat / |k|^2, zero mode removed.
    psi_like = grid.inv_k_squared * omega_hat
    return grid.deriv_y * psi_like, -grid.deriv_x * psi_like


def biot_savart(omega: RealField) -> VectorField:
    """Divergence-free velocity recovered from vorticity.

    The k = 0 mode of u is set to zero (mean-removed inversion); for nonzero
    total circulation the whole-plane rigid-rotation background has no torus
    analog and is deliberately dropped.
    """
    g = omega.grid
    wh = np.fft.fft2(omega.values)
    uxh, uyh = _biot_savart_hat(g, wh)
    return VectorField(
        RealField(g, np.fft.ifft2(uxh).real),
        RealField(g, np.fft.ifft2(uyh).real),
    )


def heat_propagator(f: RealField, tau: float) -> RealField:
    """Exact heat semigroup e^{tau * Laplacian} applied to f."""
    if tau < 0:
        raise ValueError("propagation time must be non-negative")
    if tau == 0:
        return RealField(f.grid, f.values.copy())
    fh = np.fft.fft2(f.values)
    fh *= np.exp(-f.grid.k_squared * tau)
    return RealField(f.grid, np.fft.ifft2(fh).real)


def dealias(c: SpectralCoeffs) -> SpectralCoeffs:
    """Zero all modes above the retained fraction of Nyquist (idempotent)."""
    return SpectralCoeffs(c.grid, c.coeffs * c.grid.dealias_mask)


def lp_norm(f: RealField, p: float) -> float:
    """Discrete L^p norm: (sum |f|^p h^2)^{1/p}; max |f| for p = inf."""
    if math.isinf(p):
        return float(np.max(np.abs(f.values)))
    if p < 1:
        raise ValueError("p must satisfy p >= 1 or p = inf")
    h2 = f.grid.spacing**2
    return float((np.sum(np.abs(f.values) ** p) * h2) ** (1.0 / p))
