"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 argument error,
3 resource-limit error.
"""
from __future__ import annotations

import argparse
import sys
from decimal import Decimal, InvalidOperation
from typing import List, Optional, Sequence

from . import checks
from .qudit import DomainError, ResourceLimitError
from .report import PROTOCOLS, render, run_protocol

EXIT_OK, EXIT_VERIFY, EXIT_ARGS, EXIT_RESOURCE = 0, 1, 2, 3

RULE_CHOICES = ("sum-zero", "corrected", "literal", "literal-coincidence")


class ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ArgumentError(f"{self.prog}: error: {message}")


def _float_list(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}")


def parse_grid(text: str) -> List[float]:
    """``start:stop:step`` with ``stop`` included; decimal arithmetic avoids drift."""
    try:
        start, stop, step = (Decimal(p) for p in text.split(":"))
    except (ValueError, InvalidOperation):
        raise argparse.ArgumentTypeError(f"grid must be start:stop:step, got {text!r}")
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"empty or infinite grid {text!r}")
    out = []
    x = start
    while x <= stop:
        out.append(float(x))
        x += step
    return out


def _add_common(p: argparse.ArgumentParser, sweep: bool = False) -> None:
    if sweep:
        p.add_argument("--protocol", required=True, choices=PROTOCOLS)
        p.add_argument("--dims", type=_int_list, required=True, help="e.g. 2,3,4")
        p.add_argument("--f-grid", type=parse_grid, required=True, help="start:stop:step")
    else:
        p.add_argument("--dim", type=int, required=True)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--fidelity", type=float)
        src.add_argument("--weights", type=_float_list, help="q0,q1,... over |Psi_0i>")
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--rule", choices=RULE_CHOICES, default="corrected")
    p.add_argument("--engine", choices=("enumerate", "analytic", "both"), default="analytic")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="oamdistill", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("verify", help="run every invariant check")
    for name in PROTOCOLS:
        _add_common(sub.add_parser(name, help=f"run the {name} protocol"))
    _add_common(sub.add_parser("sweep", help="sweep a grid of dimensions and fidelities"), sweep=True)
    return parser


def _verify(out) -> int:
    results = checks.run_all()
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}", file=out)
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed", file=out)
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def _rows(args):
    if args.command == "sweep":
        rows = []
        for d in args.dims:
            for F in args.f_grid:
                rows += run_protocol(args.protocol, d, fidelity=F, rule=args.rule,
                                     engine=args.engine, steps=args.steps)
        return rows
    return run_protocol(args.command, args.dim, fidelity=args.fidelity, weights=args.weights,
                        rule=args.rule, engine=args.engine, steps=args.steps)


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ArgumentError as exc:
        print(exc, file=sys.stderr)
        return EXIT_ARGS
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    if args.command == "verify":
        return _verify(sys.stdout)
    try:
        text = render(_rows(args), args.format)
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except DomainError as exc:
        print(f"argument error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    try:
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_ARGS
    return EXIT_OK


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
