"""Command-line entry point.

Subcommands::

    ctmhd run <config> [overrides]
    ctmhd convergence <config> --meshes N1 N2 ... [overrides]
    ctmhd reference1d <config> [overrides]
    ctmhd diff <snapA> <snapB>

Exit status: 0 on success, 1 on configuration errors, 2 when the solver
hits an inadmissible state (negative density / pressure, unrecoverable
Courant rejection).

The environment variable ``CTMHD_THREADS`` caps internal parallelism
(0 = automatic); the bundled kernels are single-threaded, so today the
cap is recorded but has no effect.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from . import runner
from .fv_solver import StepRejection
from .grid import ConfigurationError
from .mhd_core import AdmissibilityError
from .snapshots import read_snapshot


def _add_overrides(p: argparse.ArgumentParser):
    p.add_argument("--output-dir", default=None)
    p.add_argument("--cfl", type=float, default=None)
    p.add_argument("--limiter", default=None)
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--transverse", default=None)
    p.add_argument("--energy-option", default=None)
    p.add_argument("--seed", type=int, default=None,
                   help="randomized property tests only")


def _config_with_overrides(args) -> runner.RunConfig:
    cfg = runner.load_config(args.config)
    updates = {}
    for key in ("output_dir", "cfl", "limiter", "nu", "transverse",
                "energy_option", "seed"):
        val = getattr(args, key)
        if val is not None:
            updates[key] = val
    return replace(cfg, **updates) if updates else cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctmhd",
        description="Constrained-transport finite-volume MHD solver")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="advance a problem to its end time")
    p_run.add_argument("config")
    _add_overrides(p_run)

    p_conv = sub.add_parser("convergence",
                            help="error/order table over a mesh sequence")
    p_conv.add_argument("config")
    p_conv.add_argument("--meshes", type=int, nargs="+", required=True)
    _add_overrides(p_conv)

    p_ref = sub.add_parser("reference1d",
                           help="fine-mesh axis-aligned Riemann reference")
    p_ref.add_argument("config")
    _add_overrides(p_ref)

    p_diff = sub.add_parser("diff", help="compare two snapshot files")
    p_diff.add_argument("snap_a")
    p_diff.add_argument("snap_b")
    return parser


def _cmd_run(args) -> int:
    cfg = _config_with_overrides(args)
    state, rows = runner.run(cfg)
    print(f"finished {cfg.problem} at t={state.time:g} "
          f"after {len(rows)} steps -> {cfg.output_dir}")
    return 0


def _cmd_convergence(args) -> int:
    cfg = _config_with_overrides(args)
    os.makedirs(cfg.output_dir, exist_ok=True)
    out = os.path.join(cfg.output_dir, "convergence.csv")
    table = runner.convergence(cfg, args.meshes, out_path=out)
    for row in table:
        errs = " ".join(f"{v}={e:.3e}" for v, e in row["errors"].items())
        print(f"mesh {row['mesh']}: {errs}")
    print(f"table -> {out}")
    return 0


def _cmd_reference1d(args) -> int:
    cfg = _config_with_overrides(args)
    os.makedirs(cfg.output_dir, exist_ok=True)
    out = os.path.join(cfg.output_dir, "reference1d.csv")
    rows = runner.reference_1d(cfg, out_path=out)
    print(f"{len(rows)} profile points -> {out}")
    return 0


def _cmd_diff(args) -> int:
    fa, ta, names_a = read_snapshot(args.snap_a)
    fb, tb, names_b = read_snapshot(args.snap_b)
    if names_a != names_b or fa.interior.shape != fb.interior.shape:
        print("snapshots are not comparable (variables or mesh differ)")
        return 1
    print(f"time: {ta!r} vs {tb!r}")
    linf, l1 = runner.error_norms(fa, fb)
    for c, name in enumerate(names_a):
        print(f"{name:>4}: max|diff| = {linf[c]:.6e}  mean|diff| = "
              f"{l1[c]:.6e}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    threads = os.environ.get("CTMHD_THREADS")
    if threads is not None and not threads.isdigit():
        print(f"error: CTMHD_THREADS must be a non-negative integer",
              file=sys.stderr)
        return 1
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "convergence":
            return _cmd_convergence(args)
        if args.command == "reference1d":
            return _cmd_reference1d(args)
        return _cmd_diff(args)
    except (ConfigurationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (AdmissibilityError, StepRejection, FloatingPointError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
