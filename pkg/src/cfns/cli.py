"""Command-line front end.

    cfns <run|decay-study|rescale-check|selftest|print-config>
         [--config PATH] [--out DIR] [--k INT]

Exit codes: 0 success, 1 usage/config error (or failed assertions in the
study commands), 2 numerical failure (NaN or positivity abort). --config
accepts a file path or the name of a shipped reference config
(pure_heat.cfg, small_data.cfg, dipole.cfg, rescale_base.cfg,
profile_trends.cfg).
"""

from __future__ import annotations

import argparse
import os
import sys
from importlib import resources
from pathlib import Path

from .config import RunConfig, emit_config, parse_config
from .errors import ConfigError, NumericsError
from .harness import (
    decay_report,
    run_rescale_check,
    simulate,
    write_decay_csv,
    write_rescale_csv,
)
from .selftest import run_selftest

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICS = 2


def _load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    p = Path(path)
    if p.exists():
        return parse_config(p.read_text())
    packaged = resources.files("cfns").joinpath("configs", path)
    if packaged.is_file():
        return parse_config(packaged.read_text())
    raise ConfigError(f"config file not found: {path}")


def _thread_cap() -> int:
    raw = os.environ.get("CFNS_THREADS", "0")
    try:
        cap = int(raw)
    except ValueError:
        raise ConfigError(f"CFNS_THREADS must be an integer, got {raw!r}") from None
    if cap < 0:
        raise ConfigError("CFNS_THREADS must be >= 0")
    return cap


def _cmd_run(cfg: RunConfig, out: Path) -> int:
    simulate(cfg, outdir=out)
    print(f"wrote {out / 'timeseries.csv'}")
    return EXIT_OK


def _cmd_decay_study(cfg: RunConfig, out: Path) -> int:
    series = simulate(cfg, outdir=out)
    rows = decay_report(series, cfg)
    out.mkdir(parents=True, exist_ok=True)
    write_decay_csv(out / "decay_report.csv", rows)
    print(
        "initial amplitudes (empirical small-data regime, no canonical source): "
        f"||n0||_1 = {cfg.init.m:g}, ||c0||_inf = {cfg.init.c_bar:g}, "
        f"||omega0||_1 ~ {abs(cfg.init.gamma):g}"
    )
    width = max(len(r.quantity) for r in rows)
    for r in rows:
        verdict = r.verdict if r.verdict != "fail" else "FAIL"
        if verdict == "skip":
            verdict = "skip (rate not saturated by this data class)"
        print(
            f"{r.quantity:<{width}}  fitted {r.fitted_slope:+8.4f}  "
            f"target {r.paper_slope:+6.3f} +/- {r.band:.3f}  {verdict}"
        )
    return EXIT_OK if all(r.passed for r in rows if r.asserted) else EXIT_USAGE


def _cmd_rescale_check(cfg: RunConfig, out: Path, k: int) -> int:
    report = run_rescale_check(cfg, k)
    out.mkdir(parents=True, exist_ok=True)
    write_rescale_csv(out / "rescale_report.csv", report)
    for row in report.rows:
        print(
            f"{row.quantity:<20} deviation {row.deviation:.3e} "
            f"(tol {row.tolerance:.0e})  {'pass' if row.passed else 'FAIL'}"
        )
    return EXIT_OK if report.passed else EXIT_USAGE


def _cmd_selftest() -> int:
    results = run_selftest()
    width = max(len(r.name) for r in results)
    ok = True
    for r in results:
        ok = ok and r.passed
        print(
            f"{r.name:<{width}}  measured {r.value:.3e}  tol {r.tolerance:.0e}  "
            f"[{r.seconds:6.1f}s]  {'pass' if r.passed else 'FAIL'}"
        )
    print("selftest:", "all checks passed" if ok else "FAILURES above")
    return EXIT_OK if ok else EXIT_USAGE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfns",
        description="Pseudo-spectral chemotaxis-Navier-Stokes simulator and "
        "decay/asymptotics verification harness",
    )
    parser.add_argument(
        "command",
        choices=["run", "decay-study", "rescale-check", "selftest", "print-config"],
    )
    parser.add_argument("--config", help="config file path or shipped config name")
    parser.add_argument("--out", help="output directory (default: from config)")
    parser.add_argument("--k", type=int, default=2, help="rescale factor (default 2)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _thread_cap()  # validated; all kernels are single-threaded today
        cfg = _load_config(args.config)
        out = Path(args.out) if args.out else Path(cfg.output.directory)
        if args.command == "print-config":
            sys.stdout.write(emit_config(cfg))
            return EXIT_OK
        if args.command == "selftest":
            return _cmd_selftest()
        if args.command == "run":
            return _cmd_run(cfg, out)
        if args.command == "decay-study":
            return _cmd_decay_study(cfg, out)
        if args.command == "rescale-check":
            if args.k < 1:
                raise ConfigError("--k must be a positive integer")
            return _cmd_rescale_check(cfg, out, args.k)
        raise AssertionError(args.command)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except NumericsError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICS


if __name__ == "__main__":
    raise SystemExit(main())
