"""Command line entry point.

Exit codes: 0 when every check passes, 1 on a tolerance violation and 2 on
an invalid configuration or an unwritable output directory.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .config import ConfigError, load_config, parse_config
from .experiments import run_config
from .report import ExperimentReport, ensure_writable

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


def _emit(report: ExperimentReport, out_dir: Optional[str]) -> int:
    for line in report.verdict_lines():
        print(line)
    if out_dir is not None:
        try:
            paths = report.write(out_dir)
        except OSError as exc:
            print(f"error: cannot write report: {exc}", file=sys.stderr)
            return EXIT_INVALID
        print(f"report written to {paths[0]}")
    verdict = "PASS" if report.passed else "FAIL"
    print(f"{verdict}: {sum(r.passed for r in report.records)}/{len(report.records)} checks passed")
    return EXIT_OK if report.passed else EXIT_FAIL


def _execute(raw: dict, out_dir: Optional[str]) -> int:
    try:
        cfg = parse_config(raw)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return _run(cfg, out_dir)


def _run(cfg, out_dir: Optional[str]) -> int:
    out_dir = out_dir if out_dir is not None else cfg.outDir
    try:
        ensure_writable(out_dir)
    except OSError as exc:
        print(f"error: output directory unusable: {exc}", file=sys.stderr)
        return EXIT_INVALID
    report = run_config(cfg)
    return _emit(report, out_dir)


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return _run(cfg, args.out)


def cmd_calibrate(args) -> int:
    raw = {
        "experiment": "calibrate",
        "geometry": {"n": args.n, "K": args.K, "oversample": args.oversample},
        "calibration": {"sampleCount": args.samples, "rngSeed": args.seed, "maxBand": args.max_band,
                        "holdOut": args.hold_out},
    }
    code = _execute(raw, args.out)
    return code


def cmd_majorant(args) -> int:
    raw = {"experiment": "majorant",
           "majorant": {"c": args.c, "x1": args.x1, "N": args.order, "tau": args.tau}}
    return _execute(raw, args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hodgelab", description="Deformation experiments on the flat torus.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment described by a JSON config")
    run.add_argument("--config", required=True)
    run.add_argument("--out", default=None, help="report directory (overrides outDir in the config)")
    run.set_defaults(func=cmd_run)

    cal = sub.add_parser("calibrate", help="estimate the bracket-inverse and contraction constants")
    cal.add_argument("--n", type=int, default=2)
    cal.add_argument("--K", type=int, default=4)
    cal.add_argument("--oversample", type=int, default=2)
    cal.add_argument("--samples", type=int, default=200)
    cal.add_argument("--seed", type=int, default=0)
    cal.add_argument("--max-band", type=int, default=2)
    cal.add_argument("--hold-out", type=int, default=0)
    cal.add_argument("--out", default=None)
    cal.set_defaults(func=cmd_calibrate)

    maj = sub.add_parser("majorant", help="exact coefficients of the quadratic majorant recursion")
    maj.add_argument("--c", required=True, help="rational, e.g. 1 or 3/7")
    maj.add_argument("--x1", required=True)
    maj.add_argument("--order", type=int, required=True)
    maj.add_argument("--tau", default=None)
    maj.add_argument("--out", default=None)
    maj.set_defaults(func=cmd_majorant)

    show = sub.add_parser("schema", help="print the default configuration for an experiment")
    show.add_argument("experiment")
    show.set_defaults(func=cmd_schema)
    return parser


def cmd_schema(args) -> int:
    try:
        cfg = parse_config({"experiment": args.experiment})
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(json.dumps(cfg.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
