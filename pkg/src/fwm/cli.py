"""Command-line front end: sweep, compare, presets, check.

Exit codes: 0 success, 1 usage error, 2 numerical failure.  Any config field
can be overridden with a flag of the same dotted path, e.g.
``--input.alpha_abs 5 --input.phi 1.5707963 --gt_grid.count 100``.

Frequencies are angular (s⁻¹).  Oracle propagation always substitutes the
synthetic frequency triple (Δω₁/2, 0, 0) for the configured frequencies:
witness values depend on the frequencies only through the detuning
Δω₁ = 2ω_a − ω_b − ω_c, and the substitution removes optical-frequency
stiffness from the integrator.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .model import ConfigError, ModelParams, coefficients
from .oracle import ConvergenceError
from .residuals import eom_residual, etcr_residual, residual_scaling_slope
from .sweep import (RunConfig, UsageError, apply_overrides, compare_report_text,
                    default_compare_config, presets, rows_to_csv, rows_to_json,
                    run_compare, run_sweep)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="fwm", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON run configuration file")
        sp.add_argument("--preset", help="named preset (fig2..fig5)")
        sp.add_argument("--out", help="output path (default stdout)")
        sp.add_argument("--format", choices=["csv", "json"], help="output format")
        sp.add_argument("--workers", type=int, default=None,
                        help="parallel worker budget (env FWM_WORKERS as fallback)")
        sp.add_argument("--seed", type=int, default=None,
                        help="seed for randomized diagnostics")

    sw = sub.add_parser("sweep", help="evaluate witnesses over a (gt, phi) grid")
    common(sw)
    sw.add_argument("--oracle", action="store_true",
                    help="also evaluate every witness with the Fock oracle")

    cp = sub.add_parser("compare", help="certify closed forms against the oracle")
    common(cp)

    pr = sub.add_parser("presets", help="list the shipped figure presets")
    pr.add_argument("--format", choices=["csv", "json"], default="csv")

    ck = sub.add_parser("check", help="run ETCR / equation-of-motion diagnostics")
    common(ck)
    ck.add_argument("--cutoffs", default="10,8,8",
                    help="per-mode occupation cutoffs, comma separated")
    return p


def _parse_overrides(extra: list[str]) -> dict:
    out = {}
    i = 0
    while i < len(extra):
        tok = extra[i]
        if not tok.startswith("--") or "." not in tok:
            raise UsageError(f"unrecognized argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, raw = key.split("=", 1)
        else:
            i += 1
            if i >= len(extra):
                raise UsageError(f"override {tok!r} needs a value")
            raw = extra[i]
        try:
            val = json.loads(raw)
        except json.JSONDecodeError:
            val = raw
        out[key] = val
        i += 1
    return out


def _load_config(args, overrides, default=None) -> RunConfig:
    if args.config and args.preset:
        raise UsageError("give either --config or --preset, not both")
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            base = json.load(fh)
    elif args.preset:
        avail = presets()
        if args.preset not in avail:
            raise UsageError(f"unknown preset {args.preset!r}; "
                             f"available: {', '.join(sorted(avail))}")
        base = avail[args.preset].to_dict()
    elif default is not None:
        base = default.to_dict()
    else:
        raise UsageError("need --config or --preset")
    if overrides:
        base = apply_overrides(base, overrides)
    cfg = RunConfig.from_dict(base)
    if getattr(args, "oracle", False):
        cfg = RunConfig.from_dict(apply_overrides(cfg.to_dict(), {"oracle.enabled": True}))
    if args.format:
        cfg = RunConfig.from_dict(apply_overrides(cfg.to_dict(), {"output.format": args.format}))
    if args.out:
        cfg = RunConfig.from_dict(apply_overrides(cfg.to_dict(), {"output.path": args.out}))
    workers = args.workers
    if workers is None:
        workers = int(os.environ.get("FWM_WORKERS", "1"))
    cfg = RunConfig.from_dict(apply_overrides(cfg.to_dict(), {"workers": workers}))
    if args.seed is not None:
        cfg = RunConfig.from_dict(apply_overrides(cfg.to_dict(), {"seed": args.seed}))
    return cfg


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_sweep(args, overrides) -> int:
    cfg = _load_config(args, overrides)
    rows, summary = run_sweep(cfg)
    if cfg.output.format == "csv":
        _emit(rows_to_csv(rows), cfg.output.path)
    else:
        _emit(rows_to_json(rows, summary), cfg.output.path)
    n_witness = len(cfg.witnesses)
    sys.stderr.write(f"{n_witness} witnesses evaluated\n")
    for (label, phi), onset in summary.items():
        txt = "none" if onset is None else f"{onset:.6g}"
        sys.stderr.write(f"  onset {label} phi={phi:.6g}: {txt}\n")
    return EXIT_OK


def _cmd_compare(args, overrides) -> int:
    cfg = _load_config(args, overrides, default=default_compare_config())
    report = run_compare(cfg)
    text = json.dumps(report, indent=2, sort_keys=True)
    _emit(text + "\n", cfg.output.path)
    sys.stderr.write(compare_report_text(report))
    return EXIT_OK


def _cmd_presets(args) -> int:
    avail = presets()
    if args.format == "json":
        payload = {name: cfg.to_dict() for name, cfg in avail.items()}
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        for name, cfg in avail.items():
            delta = cfg.params.to_model().delta_omega1
            sys.stdout.write(
                f"{name}: {len(cfg.witnesses)} witnesses, "
                f"delta_omega1={delta:.6g}, g={cfg.params.g:.6g}, "
                f"gt=[{cfg.gt_grid.start}, {cfg.gt_grid.stop}] "
                f"x{cfg.gt_grid.count}\n")
    return EXIT_OK


def _cmd_check(args, overrides) -> int:
    cfg = _load_config(args, overrides, default=presets()["fig2"])
    try:
        cutoffs = tuple(int(c) for c in args.cutoffs.split(","))
    except ValueError:
        raise UsageError(f"bad --cutoffs {args.cutoffs!r}") from None
    seed = cfg.seed
    rng = np.random.default_rng(seed)
    params = cfg.params.to_model()
    delta = params.delta_omega1
    scale = abs(delta) if delta != 0.0 else 1.0
    g0 = 0.05 * scale
    t = 1.0 / scale
    p0 = ModelParams(params.omega_a, params.omega_b, params.omega_c, g0)

    ok = True
    r0 = etcr_residual(ModelParams(p0.omega_a, p0.omega_b, p0.omega_c, 0.0), t, cutoffs)
    sys.stdout.write(f"etcr residual (g=0): {r0:.3e}\n")
    ok &= r0 < 1e-12
    etcr_slope = residual_scaling_slope(p0, t, cutoffs, "etcr")
    eom_slope = residual_scaling_slope(p0, t, cutoffs, "eom")
    sys.stdout.write(f"etcr residual scaling slope: {etcr_slope:.3f}\n")
    sys.stdout.write(f"eom  residual scaling slope: {eom_slope:.3f}\n")
    ok &= etcr_slope >= 2.5 and eom_slope >= 2.5

    for trial in range(3):
        gg = g0 * rng.uniform(0.3, 1.0)
        tt = t * rng.uniform(0.3, 1.5)
        c = coefficients(ModelParams(p0.omega_a, p0.omega_b, p0.omega_c, gg), tt)
        ident = max(abs(c.f4 - (-c.f3 / 2)), abs(c.g4 + 2 * c.g3),
                    abs(c.h5 + 2 * c.h3), abs(abs(c.f1) - 1.0))
        sys.stdout.write(f"coefficient identities (trial {trial}): {ident:.3e}\n")
        ok &= ident < 1e-13
    sys.stdout.write("check: " + ("PASS" if ok else "FAIL") + "\n")
    return EXIT_OK if ok else EXIT_NUMERICAL


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        overrides = _parse_overrides(extra)
        if args.command == "sweep":
            return _cmd_sweep(args, overrides)
        if args.command == "compare":
            return _cmd_compare(args, overrides)
        if args.command == "presets":
            if overrides:
                raise UsageError("presets takes no overrides")
            return _cmd_presets(args)
        return _cmd_check(args, overrides)
    except (UsageError, ConfigError) as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (ConvergenceError, FloatingPointError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
