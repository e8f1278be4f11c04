"""Command-line front end.

Exit codes: 0 verdicts computed (whether or not they hold), 1 invalid
scenario or arguments, 2 model too large for exact inference, 3 internal
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from typing import Any, Sequence

from .corpus import check_corpus
from .inference import ModelTooLarge
from .intent import ConfigError, IntentError, check_capacity, explain
from .model import Event, Intervention, ModelError
from .scenario import QUERY_KINDS, Query, ScenarioError, load, run_query

EXIT_OK, EXIT_INVALID, EXIT_TOO_LARGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2, which means "too large" here
        raise UsageError(message)


def _dump(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="intentcheck", description="Decide intent verdicts for causal scenarios.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="validate a scenario and report intent capacity")
    p.add_argument("path")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("eval", help="evaluate intent queries")
    p.add_argument("path")
    p.add_argument("--query", help="one of: " + ", ".join(QUERY_KINDS))
    p.add_argument("--result", help="Var=val (join several with &)")
    p.add_argument("--action", action="append", default=[], help="Var=val; repeatable")
    p.add_argument("--via", help="pin the directly intended result for oblique queries")
    p.add_argument("--tau", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("corpus", help="check the shipped corpus against its golden verdicts")
    p.add_argument("--tau", type=float)
    p.add_argument("--epsilon", type=float)
    return parser


def _overrides(args) -> dict[str, float]:
    return {k: getattr(args, k) for k in ("tau", "epsilon") if getattr(args, k) is not None}


def cmd_validate(args, out) -> int:
    try:
        scenario = load(args.path)
    except OSError as exc:
        print(f"error: cannot read {args.path}: {exc.strerror or exc}", file=out)
        return EXIT_INVALID
    except ScenarioError as exc:
        if args.json:
            print(_dump({"valid": False, "error": exc.as_dict()}), file=out)
        else:
            print(f"invalid: {exc}", file=out)
        return EXIT_INVALID
    report = check_capacity(scenario)
    if args.json:
        checks = [{"requirement": c.number, "name": c.name, "passed": c.passed, "detail": c.detail}
                  for c in report.checks]
        print(_dump({"valid": True, "capacity": report.passed, "requirements": checks}), file=out)
    else:
        print("valid", file=out)
        print(report.render(), file=out)
    return EXIT_OK


def _query_from_flags(args) -> Query:
    kind = args.query.replace("-", "_")
    if kind not in QUERY_KINDS:
        raise UsageError(f"unknown query {args.query!r}; expected one of {', '.join(QUERY_KINDS)}")
    if not args.result:
        raise UsageError("--query needs --result")
    try:
        result = Event.parse(args.result)
        action = Intervention.parse(", ".join(args.action)) if args.action else None
        via = Event.parse(args.via) if args.via else None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if kind == "ulterior" and action is not None:
        raise UsageError("ulterior queries take their actions from the policy")
    return Query(kind, result, action, via)


def cmd_eval(args, out) -> int:
    try:
        scenario = load(args.path)
    except OSError as exc:
        print(f"error: cannot read {args.path}: {exc.strerror or exc}", file=out)
        return EXIT_INVALID
    except ScenarioError as exc:
        print(f"invalid: {exc}", file=out)
        return EXIT_INVALID
    if args.query:
        queries = [_query_from_flags(args)]
    elif args.result or args.action or args.via:
        raise UsageError("--result/--action/--via need --query")
    else:
        queries = list(scenario.queries)
    try:
        config = replace(scenario.config, **_overrides(args))
    except ConfigError as exc:
        print(f"invalid: bad-threshold: {exc}", file=out)
        return EXIT_INVALID

    try:
        verdicts = [(q, run_query(scenario, q, config)) for q in queries]
    except (IntentError, ModelError, ValueError) as exc:
        print(f"invalid: {exc}", file=out)
        return EXIT_INVALID

    if args.json:
        if args.query:
            doc: Any = verdicts[0][1].to_dict()
        else:
            doc = {"verdicts": [{"query": str(q), **v.to_dict()} for q, v in verdicts]}
        print(_dump(doc), file=out)
    else:
        width = max((len(str(q)) for q, _ in verdicts), default=0)
        for q, v in verdicts:
            print(f"{str(q):<{width}}  {'holds' if v.holds else 'does not hold'}", file=out)
        for q, v in verdicts:
            print(file=out)
            print(f"# {q}", file=out)
            out.write(explain(v))
    return EXIT_OK


def cmd_corpus(args, out) -> int:
    try:
        results = check_corpus(**_overrides(args))
    except ConfigError as exc:
        print(f"invalid: bad-threshold: {exc}", file=out)
        return EXIT_INVALID
    matched = 0
    for name, problems in results:
        if problems:
            print(f"MISMATCH {name}", file=out)
            for line in problems:
                print(f"  {line}", file=out)
        else:
            matched += 1
            print(f"ok       {name}", file=out)
    print(f"{matched}/{len(results)} scenarios match", file=out)
    return EXIT_OK if matched == len(results) else EXIT_INVALID


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        handler = {"validate": cmd_validate, "eval": cmd_eval, "corpus": cmd_corpus}[args.command]
        return handler(args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=out)
        return EXIT_INVALID
    except ModelTooLarge as exc:
        print(f"error: {exc}", file=out)
        return EXIT_TOO_LARGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_INVALID
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=out)
        return EXIT_INTERNAL


def entry_point() -> None:
    sys.exit(main())
