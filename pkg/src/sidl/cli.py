"""Operator command line: validate, run, serve, analyze.

Exit statuses: 0 success, 1 domain failure (validation errors, consistency
violations, rejected preconditions), 2 usage or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .analyzer import check_information_consistency, minimax_value, monte_carlo
from .engine import ChrononConfig, account_map, run_scripted, write_replay
from .errors import AnalysisError, DefinitionError, ParseError, SidlError
from .model import load_definition, validate
from .terms import parse_program, parse_term

DEFAULT_SEED = 0  # bare invocations stay reproducible


def _read_definition(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fp:
            return fp.read()
    except OSError as exc:
        print(f"cannot read {path}: {exc}", file=sys.stderr)
        sys.exit(2)


def _load(path: str, as_json: bool = False):
    source = _read_definition(path)
    try:
        clauses = parse_program(source)
    except ParseError as exc:
        _report([{"severity": "error", "line": getattr(exc, "line", 0),
                  "message": str(exc)}], as_json)
        sys.exit(1)
    findings = validate(clauses)
    errors = [f for f in findings if f.severity == "error"]
    if errors:
        _report([f.to_json() for f in findings], as_json)
        sys.exit(1)
    return load_definition(clauses, source)


def _report(findings: list, as_json: bool) -> None:
    if as_json:
        print(json.dumps({"findings": findings}, indent=2))
    else:
        for f in findings:
            print(f"{f['severity']} at line {f['line']}: {f['message']}")


def cmd_validate(args) -> int:
    source = _read_definition(args.definition)
    try:
        clauses = parse_program(source)
    except ParseError as exc:
        _report([{"severity": "error", "line": getattr(exc, "line", 0),
                  "message": str(exc)}], args.json)
        return 1
    findings = validate(clauses)
    try:
        load_definition(clauses, source)
    except SidlError as exc:
        findings = findings or []
        if not any(f.severity == "error" for f in findings):
            _report([{"severity": "error", "line": 0, "message": str(exc)}], args.json)
            return 1
    _report([f.to_json() for f in findings], args.json)
    if any(f.severity == "error" for f in findings):
        return 1
    if not args.json:
        print("ok")
    return 0


def read_script(path: str, defn) -> dict:
    """Script file: JSON array of {chronon, player, switch, action} entries."""
    with open(path, "r", encoding="utf-8") as fp:
        entries = json.load(fp)
    script: dict[int, list] = {}
    for entry in entries:
        player = parse_term(entry["player"])
        if player not in defn.players:
            raise DefinitionError(f"script references unknown player {entry['player']}")
        script.setdefault(int(entry["chronon"]), []).append(
            (player, parse_term(entry["switch"]), parse_term(entry["action"])))
    return script


def cmd_run(args) -> int:
    defn = _load(args.definition, args.json)
    script = {}
    if args.script:
        try:
            script = read_script(args.script, defn)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"cannot read script: {exc}", file=sys.stderr)
            return 2
        except DefinitionError as exc:
            print(str(exc), file=sys.stderr)
            return 1
    config = ChrononConfig(duration_ms=args.chronon_ms, seed=args.seed,
                           max_chronons=args.max_chronons)
    result = run_scripted(defn, script, config)
    if args.out:
        write_replay(args.out, defn, config, result.records)
    accounts = result.final_accounts(defn)
    if args.json:
        print(json.dumps({"chronons": len(result.records),
                          "final_accounts": accounts}, sort_keys=True))
    else:
        print(f"finished after {len(result.records)} chronons")
        for player, amount in accounts.items():
            print(f"  {player}: {amount}")
    return 0


def cmd_analyze(args) -> int:
    defn = _load(args.definition, args.json)
    limits = {"playouts": args.playouts, "max_nodes": args.max_nodes,
              "max_depth": args.max_depth, "max_chronons": args.max_chronons}
    try:
        if args.mode == "mc":
            stats = monte_carlo(defn, args.playouts,
                                args.max_chronons or 1000, seed=args.seed)
            report = {"mode": "mc", "limits": limits, "truncated": False,
                      "results": stats.to_json()}
            print(json.dumps(report, sort_keys=True))
            return 0
        if args.mode == "minimax":
            values = minimax_value(defn, prune_noop=args.prune_noop,
                                   max_nodes=args.max_nodes)
            report = {"mode": "minimax", "limits": limits, "truncated": False,
                      "results": values}
            print(json.dumps(report, sort_keys=True))
            return 0
        result = check_information_consistency(defn, max_nodes=args.max_nodes)
        report = {"mode": "consistency", "limits": limits,
                  "truncated": result.truncated, "results": result.to_json()}
        print(json.dumps(report, sort_keys=True))
        return 0 if result.passed else 1
    except AnalysisError as exc:
        print(json.dumps({"mode": args.mode, "error": str(exc)}))
        return 1


def cmd_serve(args) -> int:
    import uvicorn
    from .server import create_app

    source = _read_definition(args.definition)
    app = create_app(default_source=source, replay_dir=args.out or ".")
    uvicorn.run(app, host="127.0.0.1", port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sidl", description="Strategic-interaction definition engine")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("definition", help="definition file (.sidl)")
        p.add_argument("--seed", type=int,
                       default=int(os.environ.get("SIDL_SEED", DEFAULT_SEED)))
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("validate", help="check a definition file")
    p.add_argument("definition")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="offline scripted run with replay log")
    add_common(p)
    p.add_argument("--script", help="JSON script file")
    p.add_argument("--chronon-ms", type=int, default=0)
    p.add_argument("--max-chronons", type=int, default=None)
    p.add_argument("--out", help="replay log output path (JSONL)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("analyze", help="exhaustive or statistical analysis")
    add_common(p)
    p.add_argument("--mode", choices=("mc", "minimax", "consistency"), required=True)
    p.add_argument("--playouts", type=int, default=1000)
    p.add_argument("--max-nodes", type=int, default=10_000)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--max-chronons", type=int, default=None)
    p.add_argument("--prune-noop", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("serve", help="serve live sessions over HTTP/WebSocket")
    add_common(p)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--chronon-ms", type=int, default=3000)
    p.add_argument("--max-chronons", type=int, default=None)
    p.add_argument("--out", help="replay log directory")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SidlError as exc:
        print(str(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
