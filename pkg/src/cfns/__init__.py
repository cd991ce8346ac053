"""Pseudo-spectral simulator and verification harness for the coupled 2D
chemotaxis-Navier-Stokes system in vorticity form."""

from .config import RunConfig, parse_config
from .diagnostics import TimeSeries, compute_checkpoint, decay_slope, profile_distance
from .harness import simulate
from .integrator import StepControl, run, step
from .model import (
    InitSpec,
    PotentialSpec,
    SensitivityPair,
    SimState,
    build_initial_state,
    nonlinear_rhs,
    velocity,
)
from .spectral import (
    GridSpec,
    RealField,
    SpectralCoeffs,
    VectorField,
    biot_savart,
    dealias,
    forward_transform,
    gradient,
    heat_propagator,
    inverse_transform,
    lp_norm,
    perp_grad,
)

__version__ = "0.1.0"
