"""Exception types shared across the package."""

__all__ = ["ConfigError", "NumericsError", "PositivityError"]


class ConfigError(ValueError):
    """Invalid configuration text or out-of-range parameter (CLI exit 1)."""


class NumericsError(RuntimeError):
    """Numerical failure during a run: NaN/Inf or blow-up (CLI exit 2)."""


class PositivityError(NumericsError):
    """Density dropped below the positivity tolerance (under-resolution)."""
