"""Command-line entry point: ``nanonmr run | validate | integrals``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys
from pathlib import Path

from .errors import ConfigError, IoError, NanoNMRError
from .experiments import (
    config_hash,
    emit_csv,
    integral_rows,
    parse_config,
    run_experiment,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _load(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_config(text)


def _cmd_run(args) -> int:
    cfg = _load(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("NANONMR_THREADS", os.cpu_count() or 1))
    table = run_experiment(cfg, threads=threads)
    out = Path(args.out if args.out is not None else cfg.output)
    path = emit_csv(table, out)
    bad = sum(1 for r in table.rows if r[-1])
    print(f"{path} ({len(table.rows)} rows, {bad} infeasible)")
    return EXIT_OK


def _cmd_validate(args) -> int:
    cfg = _load(args.config)
    n = sum(1 for _ in cfg.points())
    print(f"ok: {cfg.experiment}, {n} grid points, hash {config_hash(cfg)[:12]}")
    return EXIT_OK


def _cmd_integrals(args) -> int:
    rows = integral_rows(args.order, args.alpha, args.depth)
    print(f"{'indices':>10} {'analytic':>26} {'quadrature':>26} {'rel diff':>10}")
    for r in rows:
        a = complex(r["analytic_re"], r["analytic_im"])
        q = complex(r["quadrature_re"], r["quadrature_im"])
        print(f"{r['indices']:>10} {a.real:>12.6g}{a.imag:+12.6g}j {q.real:>12.6g}{q.imag:+12.6g}j "
              f"{r['rel_diff']:>10.2e}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nanonmr", description="Nanoscale NMR sensing sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment and write CSV + manifest")
    run.add_argument("--config", required=True)
    run.add_argument("--out", help="output directory or .csv path (default: config 'output')")
    run.add_argument("--threads", type=int, help="worker threads (overrides NANONMR_THREADS)")
    run.add_argument("--seed", type=int, help="override the config seed")
    run.set_defaults(func=_cmd_run)

    val = sub.add_parser("validate", help="check a config without running it")
    val.add_argument("--config", required=True)
    val.set_defaults(func=_cmd_validate)

    integ = sub.add_parser("integrals", help="print the dipolar integral table")
    integ.add_argument("--alpha", type=float, default=0.0, help="NV tilt in radians")
    integ.add_argument("--depth", type=float, default=1.0, help="NV depth in nm")
    integ.add_argument("--order", type=int, choices=(1, 2, 3), default=2)
    integ.set_defaults(func=_cmd_integrals)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", None) is not None and args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    if getattr(args, "depth", None) is not None and not (args.depth > 0 and math.isfinite(args.depth)):
        print("error: --depth must be positive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IoError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (NanoNMRError, ArithmeticError, ValueError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
