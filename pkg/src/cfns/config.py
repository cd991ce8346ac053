"""Run configuration: line-based `section.key = value` files.

Unknown keys, unparsable values and out-of-range values are rejected with the
line number and key named. `#` starts a comment. `print-config` emits the
validated configuration in a canonical key order; the emitted text parses
back to the identical configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

from .errors import ConfigError

__all__ = ["RunConfig", "parse_config", "emit_config", "rescaled_config"]


@dataclass(frozen=True)
class GridSection:
    n_points: int = 256
    box_length: float = 100.0
    dealias_fraction: float = 2.0 / 3.0


@dataclass(frozen=True)
class ModelSection:
    chi_family: str = "constant"
    chi0: float = 0.1
    k_family: str = "linear"
    kappa: float = 0.1


@dataclass(frozen=True)
class PhiSection:
    family: str = "zero"
    amplitude: float = 0.0
    center_x: float = 0.0
    center_y: float = 0.0
    width: float = 1.0


@dataclass(frozen=True)
class InitSection:
    m: float = 0.5
    sigma_n: float = 1.0
    c_family: str = "constant"
    c_bar: float = 0.1
    sigma_c: float = 1.0
    omega_family: str = "gaussian"
    gamma: float = 0.5
    sigma_omega: float = 1.0
    dipole_separation: float = 4.0


@dataclass(frozen=True)
class TimeSection:
    t_end: float = 50.0
    dt_max: float = 0.05
    cfl: float = 0.4
    checkpoint_every: float = 1.0
    t_min: float = 1.0


@dataclass(frozen=True)
class DiagSection:
    p_list: tuple[float, ...] = (2.0,)
    q_list: tuple[float, ...] = (4.0,)
    omega_r_list: tuple[float, ...] = (2.0,)
    grad_omega_r_list: tuple[float, ...] = (1.5,)
    ball_radius: float = 2.0
    profile_r: float = 2.0
    fit_t1: float = 5.0
    fit_t2: float = 50.0


@dataclass(frozen=True)
class OutputSection:
    directory: str = "out"
    snapshots: bool = False
    snapshot_every: float = 10.0


@dataclass(frozen=True)
class RunConfig:
    grid: GridSection = field(default_factory=GridSection)
    model: ModelSection = field(default_factory=ModelSection)
    phi: PhiSection = field(default_factory=PhiSection)
    init: InitSection = field(default_factory=InitSection)
    time: TimeSection = field(default_factory=TimeSection)
    diag: DiagSection = field(default_factory=DiagSection)
    output: OutputSection = field(default_factory=OutputSection)


_SECTIONS = {
    "grid": GridSection,
    "model": ModelSection,
    "phi": PhiSection,
    "init": InitSection,
    "time": TimeSection,
    "diag": DiagSection,
    "output": OutputSection,
}

_STRING_CHOICES = {
    ("model", "chi_family"): ("constant", "linear"),
    ("model", "k_family"): ("linear", "saturating"),
    ("phi", "family"): ("zero", "gaussian_well"),
    ("init", "c_family"): ("constant", "gaussian"),
    ("init", "omega_family"): ("gaussian", "dipole"),
}

# (min, max, min_exclusive) per key; None = unbounded.
_RANGES: dict[tuple[str, str], tuple[float | None, float | None, bool]] = {
    ("grid", "box_length"): (0.0, None, True),
    ("grid", "dealias_fraction"): (0.0, 1.0, True),
    ("init", "m"): (0.0, None, False),
    ("init", "c_bar"): (0.0, None, False),
    ("init", "sigma_n"): (0.0, None, True),
    ("init", "sigma_c"): (0.0, None, True),
    ("init", "sigma_omega"): (0.0, None, True),
    ("init", "dipole_separation"): (0.0, None, True),
    ("phi", "width"): (0.0, None, True),
    ("time", "t_end"): (0.0, None, False),
    ("time", "dt_max"): (0.0, None, True),
    ("time", "cfl"): (0.0, 1.0, True),
    ("time", "checkpoint_every"): (0.0, None, True),
    ("time", "t_min"): (0.0, None, False),
    ("diag", "ball_radius"): (0.0, None, True),
    ("diag", "profile_r"): (1.0, None, False),
    ("diag", "fit_t1"): (0.0, None, True),
    ("diag", "fit_t2"): (0.0, None, True),
    ("output", "snapshot_every"): (0.0, None, True),
}


def _parse_scalar(section: str, key: str, raw: str, kind: type, line_no: int):
    where = f"line {line_no}: {section}.{key}"
    if kind is int:
        try:
            value = int(raw)
        except ValueError:
            raise ConfigError(f"{where}: expected an integer, got {raw!r}") from None
    elif kind is float:
        try:
            value = float(raw)
        except ValueError:
            raise ConfigError(f"{where}: expected a number, got {raw!r}") from None
        if not math.isfinite(value):
            raise ConfigError(f"{where}: value must be finite")
    elif kind is bool:
        lowered = raw.lower()
        if lowered in ("true", "yes", "on", "1"):
            return True
        if lowered in ("false", "no", "off", "0"):
            return False
        raise ConfigError(f"{where}: expected a boolean, got {raw!r}")
    else:
        value = raw
    choices = _STRING_CHOICES.get((section, key))
    if choices and value not in choices:
        raise ConfigError(f"{where}: must be one of {', '.join(choices)}")
    if (section, key) == ("grid", "n_points"):
        if value < 8 or value % 2 != 0:
            raise ConfigError(f"{where}: must be even, >= 8")
    bounds = _RANGES.get((section, key))
    if bounds is not None:
        lo, hi, lo_excl = bounds
        if lo is not None and (value <= lo if lo_excl else value < lo):
            cmp = ">" if lo_excl else ">="
            raise ConfigError(f"{where}: must be {cmp} {lo:g}")
        if hi is not None and value > hi:
            raise ConfigError(f"{where}: must be <= {hi:g}")
    return value


def _parse_list(section: str, key: str, raw: str, line_no: int) -> tuple[float, ...]:
    items = [s.strip() for s in raw.split(",") if s.strip()]
    if not items:
        raise ConfigError(f"line {line_no}: {section}.{key}: empty list")
    values = tuple(
        _parse_scalar(section, key, item, float, line_no) for item in items
    )
    if any(v < 1 for v in values):
        raise ConfigError(f"line {line_no}: {section}.{key}: exponents must be >= 1")
    return values


def parse_config(text: str) -> RunConfig:
    """Parse config text; omitted keys take the documented defaults."""
    overrides: dict[str, dict[str, object]] = {name: {} for name in _SECTIONS}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {line_no}: expected 'section.key = value'")
        lhs, raw = (s.strip() for s in stripped.split("=", 1))
        if "." not in lhs:
            raise ConfigError(f"line {line_no}: key {lhs!r} must be 'section.key'")
        section, key = lhs.split(".", 1)
        cls = _SECTIONS.get(section)
        if cls is None:
            raise ConfigError(f"line {line_no}: unknown section {section!r}")
        spec = {f.name: f.type for f in fields(cls)}
        if key not in spec:
            raise ConfigError(f"line {line_no}: unknown key {section}.{key}")
        default = getattr(cls(), key)
        if isinstance(default, tuple):
            overrides[section][key] = _parse_list(section, key, raw, line_no)
        else:
            overrides[section][key] = _parse_scalar(
                section, key, raw, type(default), line_no
            )
    sections = {name: cls(**overrides[name]) for name, cls in _SECTIONS.items()}
    cfg = RunConfig(**sections)
    if cfg.diag.fit_t2 <= cfg.diag.fit_t1:
        raise ConfigError("diag.fit_t2 must exceed diag.fit_t1")
    return cfg


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ", ".join(_format_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_config(cfg: RunConfig) -> str:
    """Canonical text form; parse_config(emit_config(cfg)) == cfg."""
    lines = []
    for name, cls in _SECTIONS.items():
        section = getattr(cfg, name)
        for f in fields(cls):
            lines.append(f"{name}.{f.name} = {_format_value(getattr(section, f.name))}")
    return "\n".join(lines) + "\n"


def rescaled_config(cfg: RunConfig, k: int) -> RunConfig:
    """The config of the k-rescaled run: box L/k, widths/k, times/k^2.

    Amplitudes are untouched; masses, circulations, and the sup norm of c0
    are invariant under the rescaling, which is what the check verifies.
    """
    if k < 1:
        raise ValueError("scale factor k must be a positive integer")
    k2 = float(k * k)
    return replace(
        cfg,
        grid=replace(cfg.grid, box_length=cfg.grid.box_length / k),
        phi=replace(
            cfg.phi,
            center_x=cfg.phi.center_x / k,
            center_y=cfg.phi.center_y / k,
            width=cfg.phi.width / k,
        ),
        init=replace(
            cfg.init,
            sigma_n=cfg.init.sigma_n / k,
            sigma_c=cfg.init.sigma_c / k,
            sigma_omega=cfg.init.sigma_omega / k,
            dipole_separation=cfg.init.dipole_separation / k,
        ),
        time=replace(
            cfg.time,
            t_end=cfg.time.t_end / k2,
            dt_max=cfg.time.dt_max / k2,
            checkpoint_every=cfg.time.checkpoint_every / k2,
            t_min=cfg.time.t_min / k2,
        ),
        diag=replace(
            cfg.diag,
            fit_t1=cfg.diag.fit_t1 / k2,
            fit_t2=cfg.diag.fit_t2 / k2,
        ),
    )
