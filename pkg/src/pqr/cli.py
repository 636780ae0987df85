"""Command-line interface: ``pqr check|run|width|fmt|solve``."""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from . import circuit as cc
from . import evaluator as ev
from . import typechecker as tc
from .index import IllFormedIndex
from .parser import ParseError, parse, parse_judgment
from .printer import format_program
from .solver import check, default_budget

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_TYPE = 3
EXIT_OBLIGATION = 4
EXIT_RUNTIME = 5


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def resolve_source(path: str) -> Path:
    """A path on disk, falling back to the bundled standard library for ``stdlib/...``."""
    p = Path(path)
    if p.exists():
        return p
    parts = p.parts
    if "stdlib" in parts:
        rel = parts[parts.index("stdlib") + 1:]
        bundled = resources.files("pqr").joinpath("stdlib", *rel)
        if bundled.is_file():
            return Path(str(bundled))
    raise CliError(f"cannot read {path}: no such file", EXIT_PARSE)


def load(path: str):
    source = resolve_source(path).read_text(encoding="utf-8")
    try:
        return parse(source)
    except ParseError as err:
        raise CliError(f"{path}:{err}", EXIT_PARSE) from None


def parse_index_args(items: list[str]) -> dict[str, int]:
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep or not value.strip().isdigit():
            raise CliError(f"bad index argument {item!r}; expected name=natural", EXIT_PARSE)
        out[name.strip()] = int(value)
    return out


def _check(program, args, path: str) -> tc.ProgramReport:
    try:
        return tc.check_program(program, args.mode, args.budget)
    except (tc.TypeCheckError, cc.CircuitError, IllFormedIndex) as err:
        raise CliError(f"{path}:{err}", EXIT_TYPE) from None


def cmd_check(args, out) -> int:
    program = load(args.file)
    report = _check(program, args, args.file)
    if args.json:
        out.write(json.dumps(report.to_json(), indent=2) + "\n")
    else:
        out.write(report.text() + "\n")
    return EXIT_OK if report.ok else EXIT_OBLIGATION


def _run(args, out_trace):
    program = load(args.file)
    report = _check(program, args, args.file)
    if not report.ok:
        raise CliError(report.text(), EXIT_OBLIGATION)
    entry = ev.entry_definition(program, args.entry)
    trace = ev.json_tracer(out_trace) if getattr(args, "trace", False) else None
    try:
        return ev.run_program(program, parse_index_args(args.index), entry=entry.name,
                              trace=trace, report=report.lookup(entry.name))
    except ev.WidthViolation as err:
        raise CliError(f"width check failed: {err}", EXIT_RUNTIME) from None
    except (ev.EvaluationError, cc.CircuitError, IllFormedIndex, RecursionError) as err:
        raise CliError(f"evaluation failed: {err}", EXIT_RUNTIME) from None


def cmd_run(args, out) -> int:
    result = _run(args, sys.stderr)
    if args.json:
        out.write(json.dumps(result.to_json(), indent=2) + "\n")
    else:
        out.write(f"value: {result.value}\n")
        out.write(f"type: {result.result_type}\n")
        out.write(f"width: {result.circuit.width} (bound {result.bound_value})\n")
        out.write(json.dumps(cc.to_json(result.circuit)) + "\n")
    return EXIT_OK


def cmd_width(args, out) -> int:
    result = _run(args, sys.stderr)
    out.write(f"bound: {result.bound} = {result.bound_value}\n")
    out.write(f"width: {result.circuit.width}\n")
    return EXIT_OK


def cmd_fmt(args, out) -> int:
    out.write(format_program(load(args.file)))
    return EXIT_OK


def cmd_solve(args, out) -> int:
    try:
        goal = parse_judgment(args.judgment)
        verdict = check(goal.ctx, goal.relation, goal.lhs, goal.rhs, args.budget)
    except ParseError as err:
        raise CliError(f"judgment:{err}", EXIT_PARSE) from None
    except IllFormedIndex as err:
        raise CliError(str(err), EXIT_PARSE) from None
    out.write(f"{verdict}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pqr", description="Check and run width-typed quantum circuit programs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, index_required: bool = False):
        p.add_argument("file")
        p.add_argument("--mode", choices=(tc.STRICT, tc.PERMISSIVE), default=tc.STRICT)
        p.add_argument("--budget", type=int, default=None, help="enumeration bound per index variable")
        if index_required:
            p.add_argument("--index", action="append", default=[], metavar="NAME=N")
            p.add_argument("--entry", default=None, help="definition to run (default: main or the last one)")

    p = sub.add_parser("check", help="type check a program and verify its width obligations")
    common(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("run", help="evaluate a program to a circuit")
    common(p, True)
    p.add_argument("--trace", action="store_true", help="stream fired rules to stderr")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_run)

    p = sub.add_parser("width", help="print the static width bound and the actual width")
    common(p, True)
    p.set_defaults(handler=cmd_width)

    p = sub.add_parser("fmt", help="pretty-print a program")
    p.add_argument("file")
    p.set_defaults(handler=cmd_fmt)

    p = sub.add_parser("solve", help="decide an index judgment such as 'forall i. i <= i + 1'")
    p.add_argument("judgment")
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(handler=cmd_solve)
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    if getattr(args, "budget", None) is None:
        args.budget = default_budget()
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
    try:
        return args.handler(args, out)
    except CliError as err:
        sys.stderr.write(f"pqr: {err}\n")
        return err.code


if __name__ == "__main__":
    sys.exit(main())
