"""Command-line front end.

Exit codes:

    0  success
    2  usage error, unknown functional or malformed spec
    3  a metric needs a summability modulus the sequence description lacks
    4  cord mismatch, query-bound violation or failed cord check
    5  query budget exhausted
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Sequence

from .encoding import size_of
from .experiments import (
    DEFAULT_STYLES,
    CordMismatch,
    QueryBoundExceeded,
    Verdict,
    factor,
    falsify_norm,
    verify_cord_fixed,
    verify_cord_invariance,
)
from .functionals import METRICS, MetricApproxRequest, UnknownFunctional, approximate, resolve_functional
from .machine import QueryBudgetExceeded, QueryTrace, eval_sop, parse_sop, run
from .names import MissingModulus, SpecError, load_spec, make_name
from .numerics import Dyadic, parse_number, render_decimal

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_MODULUS = 3
EXIT_CORD = 4
EXIT_BUDGET = 5

DEFAULT_SEED = 0
DEFAULT_BUDGET = 10**6


class _Fail(Exception):
    def __init__(self, code: int, message: str, payload: dict[str, Any] | None = None):
        super().__init__(message)
        self.code = code
        self.payload = payload or {}


def natural(text: str) -> int:
    """argparse type: a natural number, written as an integer, ``p/q`` or ``m*2^e``."""
    try:
        q = parse_number(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if q.denominator != 1 or q < 0:
        raise argparse.ArgumentTypeError(f"{text!r} is not a natural number")
    return int(q)


def render_cord(cord: Sequence[int]) -> str:
    """``{0..5}`` for a run of consecutive integers, else the listed elements."""
    cs = sorted(cord)
    if not cs:
        return "{}"
    if len(cs) > 2 and cs == list(range(cs[0], cs[-1] + 1)):
        return f"{{{cs[0]}..{cs[-1]}}}"
    return "{" + ", ".join(map(str, cs)) + "}"


def _value(v: Dyadic | Fraction) -> dict[str, str]:
    return {"exact": str(v), "decimal": render_decimal(v)}


def _style_label(style: str, seed: int) -> str:
    return f"seeded({seed})" if style == "seeded" else style


def _functional(ident: str):
    try:
        return resolve_functional(ident)
    except UnknownFunctional:
        raise _Fail(EXIT_INPUT, f"unknown functional {ident!r}") from None


def _trace_lines(trace: QueryTrace) -> list[str]:
    lines = [
        f"cord      {render_cord(trace.cord)}",
        f"queries   {len(trace.queries)}",
        f"cost      {trace.cost}",
    ]
    for t, q in enumerate(trace.queries):
        lines.append(f"  q{t:<3} i={q.i:<3} j={q.j:<3} {q.response}")
    return lines


# -- subcommands ---------------------------------------------------------


def cmd_eval(args: argparse.Namespace) -> tuple[dict[str, Any], list[str]]:
    f = _functional(args.functional)
    name = make_name(load_spec(args.spec), _style_label(args.style, args.seed))
    try:
        out, trace = run(f, name, args.n, args.budget)
    except QueryBudgetExceeded as exc:
        raise _Fail(EXIT_BUDGET, str(exc), {"trace": exc.trace.to_dict()}) from None  # type: ignore[attr-defined]
    doc = {"value": _value(out), "trace": trace.to_dict()}
    human = [f"{f.id} on {name.id} at n={args.n}", f"value     {out}  ({render_decimal(out)})", *_trace_lines(trace)]
    return doc, human


def cmd_metric(args: argparse.Namespace) -> tuple[dict[str, Any], list[str]]:
    x, y = load_spec(args.spec_x), load_spec(args.spec_y)
    if args.truncate is not None and args.full:
        raise _Fail(EXIT_INPUT, "--truncate and --full exclude each other")
    truncate = None if args.full else args.truncate
    precision = None if truncate is not None else args.n
    try:
        req = MetricApproxRequest(x, y, args.metric, truncate=truncate, precision=precision, root=args.root)
        value = approximate(req)
    except MissingModulus as exc:
        raise _Fail(EXIT_MODULUS, str(exc)) from None
    except ValueError as exc:
        raise _Fail(EXIT_INPUT, str(exc)) from None
    mode = f"truncate={truncate}" if truncate is not None else f"n={precision}"
    doc = {"metric": args.metric, "x": x.to_json(), "y": y.to_json(), "mode": mode, "root": args.root, "value": _value(value)}
    human = [f"{args.metric}({x.label()}, {y.label()}) [{mode}{', root' if args.root else ''}]", f"value     {value}  ({render_decimal(value)})"]
    return doc, human


def _sample_specs(directory: str):
    root = Path(directory)
    if not root.is_dir():
        raise _Fail(EXIT_INPUT, f"{directory} is not a directory")
    paths = sorted(root.glob("*.json"))
    if not paths:
        raise _Fail(EXIT_INPUT, f"no *.json sample specs in {directory}")
    return [load_spec(p) for p in paths]


def cmd_factor(args: argparse.Namespace) -> tuple[dict[str, Any], list[str]]:
    f = _functional(args.functional)
    specs = _sample_specs(args.samples)
    ell = args.l if args.l is not None else f.query_bound
    if ell is None:
        raise _Fail(EXIT_INPUT, f"{f.id} declares no query bound; pass --l")
    try:
        fact = factor(f, specs, args.n, ell=ell, precisions=args.extra_n)
    except CordMismatch as exc:
        payload = {"error": "CordMismatch", "first": exc.first.to_dict() if exc.first else None, "second": exc.second.to_dict() if exc.second else None}
        human = [f"CordMismatch: {exc}"]
        for label, tr in (("first", exc.first), ("second", exc.second)):
            if tr is not None:
                human += [f"{label} trace: {tr.name} n={tr.n}", *_trace_lines(tr)]
        raise _Fail(EXIT_CORD, "\n".join(human), payload) from None
    except QueryBoundExceeded as exc:
        payload = {"error": "QueryBoundExceeded", "trace": exc.trace.to_dict() if exc.trace else None}
        raise _Fail(EXIT_CORD, f"QueryBoundExceeded: {exc}", payload) from None
    doc = {**fact.to_dict(), "ell": ell, "n": args.n, "equivalence": "PASS"}
    human = [
        f"{f.id} factors through coordinates {list(fact.coordinates)} (l = {ell})",
        f"equivalence PASS on {fact.samples_checked} samples at n={args.n}",
    ]
    return doc, human


def cmd_falsify(args: argparse.Namespace) -> tuple[dict[str, Any], list[str]]:
    f = _functional(args.candidate)
    result = falsify_norm(f, args.n, args.budget)
    doc = {**result.to_dict(), "certificateHolds": result.certificate_holds()}
    human = [f"{result.verdict.value}", f"candidate         {result.candidate} at n={result.n}"]
    if result.verdict is Verdict.QUERY_BUDGET:
        human.append(f"budget            {args.budget} queries on the zero sequence")
        raise _Fail(EXIT_BUDGET, "\n".join(human), doc)
    o1, ol = result.observed_outputs  # type: ignore[misc]
    human += [
        f"max queried coord {result.max_queried_coord}",
        f"witness spike     index {result.witness_spike.index}, scaling {result.scaling}",  # type: ignore[union-attr]
        f"zero output       {result.zero_output}",
        f"output on y_1     {o1}  ({render_decimal(o1)})",
        f"output on y_l     {ol}  ({render_decimal(ol)})",
        f"traces coincide   {result.traces_coincide}",
    ]
    if result.claimed_values is not None:
        human.append(f"claimed values    {result.claimed_values[0]}, {result.claimed_values[1]}")
    human.append(f"certificate       {'holds' if doc['certificateHolds'] else 'FAILS'}")
    return doc, human


def cmd_cord(args: argparse.Namespace) -> tuple[dict[str, Any], list[str]]:
    f = _functional(args.functional)
    specs = [load_spec(p) for p in args.specs]
    precisions = range(args.n + 1)
    if args.fixed:
        report = verify_cord_fixed(f, specs, tuple(precisions))
        doc = report.to_dict()
        human = [f"cord-fixed check for {f.id}: {'PASS' if report.passed else 'FAIL'}"]
        if report.common_cord is not None:
            human.append(f"common cord {render_cord(report.common_cord)}")
        human += [f"  {v.kind}: {v.detail}" for v in report.violations]
        ok = report.passed
    else:
        reports = [verify_cord_invariance(f, s, args.styles, precisions) for s in specs]
        doc = {"functional": f.id, "passed": all(r.passed for r in reports), "reports": [r.to_dict() for r in reports]}
        human = []
        for r in reports:
            human.append(f"cord invariance for {f.id} on {r.spec}: {'PASS' if r.passed else 'FAIL'} ({r.runs} runs)")
            for n, c in r.cords.items():
                human.append(f"  n={n:<3} {render_cord(c)}")
            for d in r.disagreements:
                human.append(f"  n={d.n}: {d.first.name} {render_cord(d.first.cord)} vs {d.second.name} {render_cord(d.second.cord)}")
        ok = doc["passed"]
    if not ok:
        raise _Fail(EXIT_CORD, "\n".join(human), doc)
    return doc, human


_SIZES: dict[str, Callable[[int], int]] = {
    "identity": lambda m: m,
    "square": lambda m: m * m,
    "cube": lambda m: m**3,
}


def cmd_sop(args: argparse.Namespace) -> tuple[dict[str, Any], list[str]]:
    try:
        p = parse_sop(args.expr)
    except ValueError as exc:
        raise _Fail(EXIT_INPUT, str(exc)) from None
    if args.size in _SIZES:
        size = _SIZES[args.size]
    else:
        fn = make_name(load_spec(args.size)).regular_fn()

        def size(m: int) -> int:
            return size_of(fn, m)

    value = eval_sop(p, size, args.x)
    doc = {"polynomial": str(p), "size": args.size, "x": args.x, "value": value}
    return doc, [f"{p} at x={args.x} with f={args.size}: {value}"]


# -- parser --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seqreal", description="Oracle computation over sequences of reals.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, n_default: int = 8) -> None:
        p.add_argument("-n", type=natural, default=n_default, help=f"precision (default {n_default})")
        p.add_argument("--json", action="store_true", help="emit JSON")

    p = sub.add_parser("eval", help="run a functional on a spec and show its trace")
    p.add_argument("functional")
    p.add_argument("spec")
    common(p)
    p.add_argument("--style", choices=("standard", "leftApprox", "seeded"), default="standard")
    p.add_argument("--seed", type=natural, default=DEFAULT_SEED)
    p.add_argument("--budget", type=natural, default=DEFAULT_BUDGET)
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("metric", help="approximate d1, d2 or D")
    p.add_argument("metric", choices=METRICS)
    p.add_argument("spec_x")
    p.add_argument("spec_y")
    common(p)
    p.add_argument("--truncate", type=natural, help="exact lower bound truncated at M")
    p.add_argument("--full", action="store_true", help="approximate the full metric to 2^-n (default)")
    p.add_argument("--root", action="store_true", help="square root of d2")
    p.set_defaults(handler=cmd_metric)

    p = sub.add_parser("factor", help="factor a bounded-query functional through its coordinates")
    p.add_argument("functional")
    p.add_argument("samples", help="directory of *.json specs")
    common(p)
    p.add_argument("--l", type=natural, help="query bound (default: the functional's own)")
    p.add_argument("--extra-n", type=natural, nargs="*", default=[], help="more precisions that must share the coordinates")
    p.set_defaults(handler=cmd_factor)

    p = sub.add_parser("falsify", help="run the norm falsifier on a candidate")
    p.add_argument("candidate")
    common(p)
    p.add_argument("--budget", type=natural, default=DEFAULT_BUDGET)
    p.set_defaults(handler=cmd_falsify)

    p = sub.add_parser("cord", help="check cord invariance (default) or fixed cords (--fixed)")
    p.add_argument("functional")
    p.add_argument("specs", nargs="+")
    common(p)
    p.add_argument("--fixed", action="store_true")
    p.add_argument("--styles", nargs="+", default=list(DEFAULT_STYLES))
    p.set_defaults(handler=cmd_cord)

    p = sub.add_parser("sop", help="evaluate a second-order polynomial")
    p.add_argument("expr")
    p.add_argument("-x", type=natural, default=0)
    p.add_argument("--size", default="identity", help="identity, square, cube or a spec path (its name's size function)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_sop)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc, human = args.handler(args)
        code = EXIT_OK
    except _Fail as fail:
        if args.json and fail.payload:
            print(json.dumps({**fail.payload, "exitCode": fail.code, "message": str(fail)}, indent=2))
        else:
            print(str(fail), file=sys.stderr)
        return fail.code
    except SpecError as exc:
        print(f"malformed spec: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except MissingModulus as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_MODULUS
    if args.json:
        print(json.dumps(doc, indent=2))
    else:
        print("\n".join(human))
    return code


if __name__ == "__main__":
    sys.exit(main())
