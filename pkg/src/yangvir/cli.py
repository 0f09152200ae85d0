"""Command-line interface: ``yangvir eval|check|derive|parse``.

Exit codes: 0 success or pass, 1 check or assertion failure, 2 usage, parse
or algebra error.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction

from . import checks, derivation
from .algebra import Element, IndexedParam
from .dsl import load_presentation, parse_expression, parse_presentation
from .errors import AlgebraError, DerivationError, ParseError, WindowTooSmallError
from .presentation import PROFILES, builtin_presentation
from .tensor import TensorElement, bialgebra_for

_RATIONAL = re.compile(r"\s*[+-]?\d+(?:\s*/\s*\d+)?\s*")


def rational(text: str) -> Fraction:
    if not _RATIONAL.fullmatch(text):
        raise argparse.ArgumentTypeError(f"{text!r} is not a rational number (use p or p/q)")
    try:
        return Fraction(text.replace(" ", ""))
    except ZeroDivisionError:
        raise argparse.ArgumentTypeError(f"{text!r} has a zero denominator") from None


def param_value(text: str):
    """``2/3`` or a table such as ``{1:1, 2:2, default:1}``."""
    text = text.strip()
    if not text.startswith("{"):
        return rational(text)
    if not text.endswith("}"):
        raise argparse.ArgumentTypeError(f"unterminated table {text!r}")
    entries, default = {}, None
    for item in filter(None, (s.strip() for s in text[1:-1].split(","))):
        key, sep, value = item.partition(":")
        if not sep:
            raise argparse.ArgumentTypeError(f"table entry {item!r} is not key:value")
        key = key.strip()
        if key == "default":
            default = rational(value)
        else:
            k = rational(key)
            if k.denominator != 1:
                raise argparse.ArgumentTypeError(f"table key {key!r} is not an integer")
            entries[int(k)] = rational(value)
    try:
        return IndexedParam.of(entries, default)
    except (AlgebraError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def param_override(text: str) -> tuple:
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    return name.strip(), param_value(value)


def non_negative(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def positive(text: str) -> int:
    value = non_negative(text)
    if value == 0:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--presentation", metavar="FILE", help="load a .lba presentation")
    src.add_argument("--profile", choices=PROFILES, default=None, help="built-in presentation (default: example)")
    common.add_argument("--window", type=non_negative, default=None, help="mode window M (default 4)")
    common.add_argument("--param", type=param_override, action="append", default=[], metavar="K=V",
                        help="override a declared parameter; V is p/q or {1:1,2:2,default:1}")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--jobs", type=positive, default=os.cpu_count() or 1)
    common.add_argument("--no-timing", action="store_true", help="omit elapsed times")
    common.add_argument("--output", metavar="FILE", help="write output here instead of stdout")

    parser = argparse.ArgumentParser(prog="yangvir", description="Exact string-algebra and Yangian bialgebra toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", parents=[common], help="evaluate an expression to normal form")
    p_eval.add_argument("expression")

    p_check = sub.add_parser("check", parents=[common], help="run a verification suite")
    p_check.add_argument("suite", choices=("jacobi", "bialgebra", "casimir"))
    p_check.add_argument("--fuzz", type=non_negative, default=0, help="extra random product checks (bialgebra)")
    p_check.add_argument("--seed", type=int, default=0)

    p_derive = sub.add_parser("derive", parents=[common], help="re-derive a constraint system")
    p_derive.add_argument("target", choices=("gamma", "central", "fg-epsilon", "delta-prime"))
    p_derive.add_argument("--e1", type=rational, default=Fraction(1))
    p_derive.add_argument("--e2", type=rational, default=Fraction(1))
    p_derive.add_argument("--alpha", type=rational, default=Fraction(0))
    p_derive.add_argument("--beta", type=rational, default=Fraction(0))
    p_derive.add_argument("--n-window", type=non_negative, default=None)
    p_derive.add_argument("--target", dest="tensor", default="a[0] (x) a[0]^2 + a[0]^2 (x) a[0]",
                          help="tensor to invert under D' (delta-prime)")
    p_derive.add_argument("--degree", type=non_negative, default=3)

    p_parse = sub.add_parser("parse", parents=[common], help="validate a .lba file")
    p_parse.add_argument("file", help="path, or - for stdin")
    return parser


def _presentation(args):
    if args.presentation:
        return load_presentation(args.presentation)
    return builtin_presentation(args.profile or "example")


def _emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _report(args, report) -> int:
    timing = not args.no_timing
    _emit(args, report.to_json(timing) if args.format == "json" else report.to_text(timing))
    return 0 if report.passed else 1


def cmd_eval(args) -> int:
    pres = _presentation(args)
    params = dict(args.param)
    bi = bialgebra_for(pres, params)
    value = parse_expression(args.expression, pres, params)
    text = bi.render(value)
    if args.format == "json":
        out = {"expression": args.expression, "result": text}
        if isinstance(value, Element):
            g = bi.algebra.grade(value)
            out["grade"] = None if g is None else int(g)
        else:
            out["arity"] = value.arity
        text = json.dumps(out, indent=2)
    _emit(args, text)
    return 0


def cmd_check(args) -> int:
    pres = _presentation(args)
    params = dict(args.param)
    pres.bind(params)
    window = 4 if args.window is None else args.window
    if args.suite == "jacobi":
        report = checks.check_jacobi(pres, params, window, jobs=args.jobs)
    elif args.suite == "bialgebra":
        report = checks.check_bialgebra(pres, params, window, jobs=args.jobs, fuzz=args.fuzz, seed=args.seed)
    else:
        report = checks.check_casimir(pres, params, window)
    return _report(args, report)


def cmd_derive(args) -> int:
    window = 4 if args.window is None else args.window
    if args.target == "gamma":
        report = derivation.gamma_report(window, args.n_window)
    elif args.target == "central":
        report = derivation.central_report(window)
    elif args.target == "fg-epsilon":
        report = derivation.fg_epsilon_report(args.e1, args.e2, window, args.alpha, args.beta)
    else:
        target = parse_expression(args.tensor, _presentation(args), dict(args.param))
        if not isinstance(target, TensorElement) or target.arity != 2:
            raise ParseError("--target must be a two-slot tensor such as a[0] (x) a[0]^2", 1, 1, args.tensor)
        report = derivation.delta_prime_report(target, args.degree)
    return _report(args, report)


def cmd_parse(args) -> int:
    if args.file == "-":
        pres = parse_presentation(sys.stdin.read())
    else:
        pres = load_presentation(args.file)
    if args.format == "json":
        table = pres.table
        out = {
            "status": "ok",
            "families": [f.name for f in table.families],
            "central": sorted(str(g) for g in table.central),
            "rules": len(table.rules),
            "cotails": [c.family for c in pres.cotails],
            "params": sorted(k for k, _ in pres.params.values),
            "canonical": pres.canonical(),
        }
        _emit(args, json.dumps(out, indent=2))
    else:
        _emit(args, pres.canonical().rstrip("\n") or "(empty presentation)")
    return 0


COMMANDS = {"eval": cmd_eval, "check": cmd_check, "derive": cmd_derive, "parse": cmd_parse}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return COMMANDS[args.command](args)
    except WindowTooSmallError as exc:
        print(f"yangvir: error: {exc}", file=sys.stderr)
        return 2
    except DerivationError as exc:
        print(f"yangvir: derivation failed: {exc}", file=sys.stderr)
        return 1
    except (ParseError, AlgebraError, OSError, ValueError) as exc:
        print(f"yangvir: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
