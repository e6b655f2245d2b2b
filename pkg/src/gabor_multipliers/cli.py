"""Command-line entry point: ``gabor-multipliers <subcommand> instance.json``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .driver import (EXIT_INPUT, EXIT_PASS, classify_instance, load_instance, plot_instance,
                     run_certificate, run_multiplier_check, run_verify)
from .errors import GaborError
from .serialize import dumps


def _common(p: argparse.ArgumentParser):
    p.add_argument("instance", help="instance JSON with D or A and B")
    p.add_argument("--delta", help="override the construction parameter (\"p/q\")")
    p.add_argument("--epsilon", type=float, help="verify in epsilon mode with this tolerance")
    p.add_argument("--seed", type=int, help="seed for sampling and probe multipliers")
    p.add_argument("--trunc", type=int, help="also report the truncated frame sum")
    p.add_argument("--window-radius", type=int, help="coefficient radius for cocycle checks")
    p.add_argument("--out", help="write the JSON (or SVG) report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gabor-multipliers",
                                 description="Parseval Gabor generators and frame multipliers for box-union sets")
    sub = ap.add_subparsers(dest="cmd", required=True)
    _common(sub.add_parser("classify", help="reduce and classify a lattice pair"))
    _common(sub.add_parser("certificate", help="build and verify generators for all four pairs"))
    p = sub.add_parser("verify", help="verify a step-function generator file")
    _common(p)
    p.add_argument("generator", help="step function JSON")
    p = sub.add_parser("multiplier-check", help="check a multiplier file")
    _common(p)
    p.add_argument("multiplier", help="multiplier JSON")
    p = sub.add_parser("plot", help="SVG of the strategy sets of one pair")
    _common(p)
    p.add_argument("--pair", default="2,2", help="pair index i,j (default 2,2)")
    return ap


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        inst = load_instance(args.instance, delta=args.delta, epsilon=args.epsilon, seed=args.seed,
                             trunc=args.trunc, window_radius=args.window_radius)
        if args.cmd == "classify":
            report, code = classify_instance(inst), EXIT_PASS
        elif args.cmd == "certificate":
            report, code = run_certificate(inst)
        elif args.cmd == "verify":
            report, code = run_verify(inst, args.generator)
        elif args.cmd == "multiplier-check":
            report, code = run_multiplier_check(inst, args.multiplier)
        else:
            i, j = (int(t) for t in args.pair.split(","))
            _emit(plot_instance(inst, (i, j)), args.out)
            return EXIT_PASS
    except GaborError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_INPUT
    _emit(dumps(report), args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
