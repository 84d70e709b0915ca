"""Command-line experiment runner.

    cdlab run --config path.json
    cdlab run --preset NAME [--eps X] [--n N] [--out DIR]
    cdlab presets

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

from ..discretize import SingularSystemError
from .config import ConfigError, ExperimentConfig, from_dict, load_config, load_preset, preset_names
from .runner import ConvergenceTable, RunResult, convergence, run

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def list_presets() -> str:
    lines = []
    for name in preset_names():
        lines.append(f"{name:15s} {load_preset(name).get('description', '')}")
    return "\n".join(lines)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cdlab", description="convection-diffusion discretization lab")
    sub = p.add_subparsers(dest="command")
    r = sub.add_parser("run", help="run an experiment")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="JSON config file")
    src.add_argument("--preset", help="shipped preset name (see 'cdlab presets')")
    r.add_argument("--eps", type=float, help="override eps")
    r.add_argument("--n", type=int, help="override n")
    r.add_argument("--out", default="out", help="output directory (default: out)")
    sub.add_parser("presets", help="list presets")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_OK
    if args.command == "presets":
        print(list_presets())
        return EXIT_OK
    try:
        if args.config:
            cfg = load_config(args.config)
            if args.eps is not None or args.n is not None:
                doc = {k: v for k, v in vars(cfg).items()}
                cfg = from_dict(doc, eps=args.eps, n=args.n)
        else:
            cfg = from_dict({"preset": args.preset}, eps=args.eps, n=args.n)
        result = run(cfg, args.out)
    except ConfigError as exc:
        print(f"cdlab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SingularSystemError, ArithmeticError) as exc:
        print(f"cdlab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for path in result.files:
        print(path)
    return EXIT_OK


__all__ = ["main", "run", "convergence", "ConvergenceTable", "RunResult", "ExperimentConfig", "list_presets"]
