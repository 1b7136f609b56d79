"""Command line entry point.

Exit codes: 0 success, 1 check failed (closed-form mismatch or exponent out
of tolerance), 2 configuration error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .core import ConfigurationError
from .harness.config import load_config
from .harness.io import dumps, write_json
from .harness.runs import LEMMA_TOLERANCE, emit_fig_data, run_simulation, run_sweep, verify_lemma, write_simulation

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _simulate(args) -> int:
    config = load_config(args.config)
    for N in config.sim.sizes:
        result = run_simulation(config, N)
        written = write_simulation(result, args.out_dir)
        if not written:
            sys.stdout.write(dumps(result.summary))
        for path in written:
            print(path, file=sys.stderr)
    return EXIT_OK


def _verify(args) -> int:
    config = load_config(args.config)
    report = verify_lemma(config, args.tolerance)
    sys.stdout.write(dumps(report))
    if config.outputs.report_json:
        write_json(config.outputs.report_json, report)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def _sweep(args) -> int:
    config = load_config(args.config)
    report = run_sweep(config, jobs=args.jobs, oracle_only=args.oracle_only or None)
    sys.stdout.write(dumps(report))
    if config.outputs.report_json:
        write_json(config.outputs.report_json, report)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def _figdata(args) -> int:
    data = emit_fig_data(args.scenario, args.N, out_dir=args.out_dir)
    for path in data["files"]:
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chainstab", description="String-instability harness for vehicle chains.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one simulation per configured N")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", type=Path)
    p.set_defaults(func=_simulate)

    p = sub.add_parser("verify-lemma", help="compare simulated errors with the closed form")
    p.add_argument("--config", required=True)
    p.add_argument("--tolerance", type=float, default=LEMMA_TOLERANCE)
    p.set_defaults(func=_verify)

    p = sub.add_parser("sweep", help="fit growth exponents over N_list")
    p.add_argument("--config", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--oracle-only", action="store_true")
    p.set_defaults(func=_sweep)

    p = sub.add_parser("figdata", help="write plot data for the figure scenarios")
    p.add_argument("--scenario", required=True, choices=("fig1", "fig2", "fig3"))
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--out-dir", type=Path, default=Path("."))
    p.set_defaults(func=_figdata)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigurationError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
