"""Command line entry point: ``subradiant {run,sweep,compare,validate}``.

Exit codes: 0 success, 1 config or validation error, 2 numerical failure,
3 sweep finished with failed points.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import __version__
from .config import load_config, parse_config
from .errors import ConfigError, InvalidStateError, StiffnessError
from .runner import (NumericalFailure, compare_full_vs_reduced, run_scenario, sweep_detuning,
                     validate_scenario)

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_PARTIAL = 0, 1, 2, 3

log = logging.getLogger("subradiant")


def build_parser():
    parser = argparse.ArgumentParser(prog="subradiant", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="scenario config file")
    common.add_argument("--preset", metavar="NAME", help="override the config preset")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--propagator", choices=("spectral", "rk"))
    common.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a config key (repeatable)")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="propagate one scenario")
    sweep = sub.add_parser("sweep", parents=[common], help="concurrence over detuning and time")
    sweep.add_argument("--workers", type=int, default=None, help="worker processes")
    sub.add_parser("compare", parents=[common], help="full model against the rate equations")
    sub.add_parser("validate", parents=[common], help="generator and state checks")
    return parser


def _config(args):
    overrides = list(args.overrides)
    if args.propagator:
        overrides.append(f"run.propagator={args.propagator}")
    if getattr(args, "workers", None) is not None:
        overrides.append(f"run.workers={args.workers}")
    kw = {"preset": args.preset, "overrides": overrides, "out_dir": args.out}
    if args.config:
        return load_config(args.config, **kw)
    if args.command == "sweep" and args.preset is None:
        kw["preset"] = "detuning_sweep"
    return parse_config("", **kw)


def _print(obj):
    print(json.dumps(obj, indent=2, default=float))


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = _config(args)
        if args.command == "run":
            result = run_scenario(config)
            c = result.column("C")
            _print({"preset": config.preset, "method": result.trajectory.method,
                    "max_concurrence": float(c.max()),
                    "files": [str(f) for f in result.files]})
            return EXIT_OK
        if args.command == "sweep":
            result = sweep_detuning(config)
            _print({"points": len(result.detunings),
                    "decay_rates": [None if np.isnan(r) else float(r) for r in result.decay_rates],
                    "failures": {str(k): v for k, v in result.failures.items()},
                    "files": [str(f) for f in result.files]})
            return EXIT_OK if result.complete else EXIT_PARTIAL
        if args.command == "compare":
            summary = compare_full_vs_reduced(config)
            _print(summary)
            return EXIT_OK if summary["passed"] else EXIT_INVALID
        report = validate_scenario(config)
        _print(report)
        return EXIT_OK if report["ok"] else EXIT_INVALID
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericalFailure, StiffnessError, InvalidStateError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
