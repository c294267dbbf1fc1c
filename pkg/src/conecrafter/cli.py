"""Command line front end.

Exit codes: 0 success, 2 validation failure, 3 verification incomplete,
4 parse failure. Reports are deterministic JSON on stdout (and --out);
timing goes to stderr so repeated runs stay byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .documents import load_document
from .errors import (
    ClosureError,
    DeskScaleError,
    ParseError,
    SearchExhausted,
    ValidationError,
)
from .pipeline import COMMANDS, run_verify

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INCOMPLETE = 3
EXIT_PARSE = 4


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conecrafter",
        description="polarized torus actions, invariant cones, fundamental domains",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "check": "validate a document's invariants",
        "endo": "invariant endomorphism algebra and its simple factors",
        "cone": "invariant form lattice, cone flags, test class verdicts",
        "funddom": "construct the fundamental domain",
        "reduce": "reduce test forms with word certificates",
        "verify": "tiling, overlap and transfer verification",
    }
    for name, help_text in specs.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input", help="path to a document JSON file")
        p.add_argument("--out", help="also write the report to this path")
        p.add_argument("--seed", type=int, default=42, help="deterministic seed")
        if name == "verify":
            p.add_argument("--samples", type=int, default=1000, help="tiling sample count")
            p.add_argument(
                "--max-steps", type=int, default=20_000, help="search budget per sample"
            )
    return parser


def _emit(report: dict, out_path: str | None) -> None:
    text = json.dumps(report, indent=2) + "\n"
    sys.stdout.write(text)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    started = time.perf_counter()
    try:
        doc = load_document(args.input)
        if args.command == "verify":
            report = run_verify(
                doc, seed=args.seed, samples=args.samples, max_steps=args.max_steps
            )
        else:
            report = COMMANDS[args.command](doc, seed=args.seed)
    except ParseError as exc:
        _emit({"error": {"type": "parse", "message": str(exc)}}, getattr(args, "out", None))
        return EXIT_PARSE
    except (ValidationError, ClosureError, DeskScaleError) as exc:
        detail = {"type": "validation", "message": str(exc), "invariant": exc.invariant}
        _emit({"error": detail}, getattr(args, "out", None))
        return EXIT_VALIDATION
    except SearchExhausted as exc:
        _emit({"error": {"type": "incomplete", "message": str(exc)}}, getattr(args, "out", None))
        return EXIT_INCOMPLETE
    elapsed = (time.perf_counter() - started) * 1000.0
    _emit(report, args.out)
    print(f"# {args.command} {args.input}: {elapsed:.1f} ms", file=sys.stderr)
    if args.command == "verify" and not report.get("complete", False):
        return EXIT_INCOMPLETE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
