"""Command-line shell: load a world (and a script), run, report.

Subcommands:
    check WORLD                parse and validate only
    eval WORLD SCRIPT          execute eval/assert/disambiguate/explain
    disambiguate WORLD STMT    decide the mode of one statement
    explain WORLD STMT         decide, enumerate, and evaluate readings

Exit codes: 0 all asserts true and no errors; 1 some assert false or
undefined; 2 diagnostics or usage errors. Reports are deterministic:
identical inputs give byte-identical output in both formats.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .algebra import Instantiation, aggregate_sum, cardinality, filter_members, instantiate, ratio
from .dsl import (
    AssertCommand,
    CardExpr,
    Diagnostic,
    DisambiguateCommand,
    EvalCommand,
    ExplainCommand,
    Expr,
    InstExpr,
    RatioExpr,
    Script,
    SumExpr,
    parse_script,
    parse_world,
)
from .errors import (
    EmptyDenominator,
    MissingMeasure,
    OutsideLifeSpan,
    TempcollError,
)
from .model import Policy, World
from .readings import Decision, Reading, analyze, decide_mode

__all__ = ["Report", "CommandOutcome", "run", "format_report", "exit_code", "main"]

# Data conditions render as undefined values; everything else in this
# family is an encoding bug and becomes an error diagnostic.
_UNDEFINED_ERRORS = (MissingMeasure, EmptyDenominator, OutsideLifeSpan)


@dataclass(frozen=True)
class CommandOutcome:
    """One executed command: text lines for humans, a JSON payload for
    machines, and whether it counts as a failure for the exit code."""

    kind: str
    lines: tuple[str, ...]
    data: dict
    failed: bool = False


@dataclass
class Report:
    commands: list[CommandOutcome] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def status(self) -> str:
        if any(d.severity == "error" for d in self.diagnostics):
            return "error"
        if any(c.failed for c in self.commands):
            return "fail"
        return "ok"


def exit_code(report: Report) -> int:
    return {"ok": 0, "fail": 1, "error": 2}[report.status]


# ---------------------------------------------------------------------------
# Value rendering


def _decimal(value: Fraction) -> str:
    try:
        return format(float(value), ".6g")
    except OverflowError:
        return str(value)


def _rational_json(value: Fraction) -> dict:
    return {
        "type": "rational",
        "num": value.numerator,
        "den": value.denominator,
        "decimal": _decimal(value),
    }


def _value_json(value: object) -> dict:
    if isinstance(value, Fraction):
        return _rational_json(value)
    if isinstance(value, int):
        return {"type": "natural", "value": value}
    if isinstance(value, Instantiation):
        return {
            "type": "instantiation",
            "members": [str(s) for s in value.sorted_members()],
            "dropped": sorted(value.dropped),
        }
    raise TypeError(f"unrenderable value {value!r}")


def _value_text(value: object) -> str:
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value)
        return f"{value} ({_decimal(value)})"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Instantiation):
        inner = ", ".join(str(s) for s in value.sorted_members())
        text = "{" + inner + "}"
        if value.dropped:
            text += f" dropped: {', '.join(sorted(value.dropped))}"
        return text
    raise TypeError(f"unrenderable value {value!r}")


def _operand_text(value: object) -> str:
    # Compact form used inside assert details: exact fractions, no decimals.
    if isinstance(value, (Fraction, int)):
        return str(value)
    return _value_text(value)


# ---------------------------------------------------------------------------
# Script execution


def _eval_inst(world: World, expr: InstExpr, policy: Policy) -> Instantiation:
    inst = instantiate(world, expr.collection, expr.at, policy)
    if expr.filter_predicate is not None:
        assert expr.filter_pattern is not None
        inst = filter_members(world, inst, expr.filter_predicate, expr.filter_pattern)
    return inst


def _eval_expr(world: World, expr: Expr, policy: Policy) -> object:
    if isinstance(expr, InstExpr):
        return _eval_inst(world, expr, policy)
    if isinstance(expr, CardExpr):
        return cardinality(_eval_inst(world, expr.inst, policy))
    if isinstance(expr, RatioExpr):
        return ratio(
            _eval_inst(world, expr.part, policy),
            _eval_inst(world, expr.whole, policy),
        )
    if isinstance(expr, SumExpr):
        return aggregate_sum(world, expr.measure, _eval_inst(world, expr.inst, policy))
    raise TypeError(f"unknown expression {expr!r}")


def _compare(left: object, op: str, right: object) -> bool:
    if isinstance(left, (int, Fraction)) and isinstance(right, (int, Fraction)):
        if op == "<":
            return left < right
        if op == ">":
            return left > right
        return left == right
    if isinstance(left, Instantiation) and isinstance(right, Instantiation):
        if op == "=":
            return left.members == right.members
        raise TempcollError("instantiations only compare with '='")
    raise TempcollError("comparison needs two numbers or two instantiations")


def _decision_json(statement_id: str, decision: Decision, kind: str) -> dict:
    data = {
        "kind": kind,
        "statement": statement_id,
        "mode": decision.mode,
        "rules": [
            {"id": r.id, "justification": r.justification} for r in decision.fired_rules
        ],
    }
    if kind == "explain":
        data["readings"] = [_reading_json(r) for r in decision.readings]
    return data


def _reading_json(reading: Reading) -> dict:
    data: dict = {"kind": reading.kind, "formula": reading.formula}
    if reading.truth is not None:
        data["truth"] = reading.truth
    else:
        data["truth"] = "undefined"
        data["reason"] = reading.reason or ""
    data["witnesses"] = [
        {"label": w.label, "detail": w.detail} for w in reading.witnesses
    ]
    return data


def _decision_lines(statement_id: str, decision: Decision, kind: str) -> list[str]:
    rule_ids = ", ".join(decision.rule_ids)
    lines = [f"{kind} {statement_id}: {decision.mode} [{rule_ids}]"]
    for rule in decision.fired_rules:
        lines.append(f"  rule {rule.id}: {rule.justification}")
    if kind == "explain":
        for reading in decision.readings:
            lines.append(f"  reading {reading.kind}: {reading.truth_label}")
            lines.append(f"    formula: {reading.formula}")
            if reading.reason is not None:
                lines.append(f"    reason: {reading.reason}")
            for w in reading.witnesses:
                lines.append(f"    witness {w.label}: {w.detail}")
    return lines


def _run_decision_command(
    report: Report, world: World, statement_id: str, kind: str, source: str, line: int
) -> None:
    try:
        stmt = world.statement(statement_id)
        decision = (
            analyze(world, stmt) if kind == "explain" else decide_mode(world, stmt)
        )
    except TempcollError as e:
        report.diagnostics.append(Diagnostic("error", str(e), line, 1, source))
        return
    report.commands.append(
        CommandOutcome(
            kind,
            tuple(_decision_lines(statement_id, decision, kind)),
            _decision_json(statement_id, decision, kind),
        )
    )


def _run_script(report: Report, world: World, script: Script, policy: Policy, source: str) -> None:
    index = 0
    for cmd in script.commands:
        if isinstance(cmd, (EvalCommand, AssertCommand)):
            index += 1
        if isinstance(cmd, EvalCommand):
            try:
                value = _eval_expr(world, cmd.expr, policy)
            except _UNDEFINED_ERRORS as e:
                report.commands.append(
                    CommandOutcome(
                        "eval",
                        (f"eval #{index}: undefined ({e})",),
                        {
                            "kind": "eval",
                            "index": index,
                            "expression": cmd.text,
                            "value": {"type": "undefined", "reason": str(e)},
                        },
                    )
                )
                continue
            except TempcollError as e:
                report.diagnostics.append(
                    Diagnostic("error", str(e), cmd.line, 1, source)
                )
                continue
            report.commands.append(
                CommandOutcome(
                    "eval",
                    (f"eval #{index}: {_value_text(value)}",),
                    {
                        "kind": "eval",
                        "index": index,
                        "expression": cmd.text,
                        "value": _value_json(value),
                    },
                )
            )
        elif isinstance(cmd, AssertCommand):
            try:
                left = _eval_expr(world, cmd.left, policy)
                right = _eval_expr(world, cmd.right, policy)
                truth = _compare(left, cmd.op, right)
            except _UNDEFINED_ERRORS as e:
                report.commands.append(
                    CommandOutcome(
                        "assert",
                        (f"assert #{index}: undefined ({e})",),
                        {
                            "kind": "assert",
                            "index": index,
                            "expression": cmd.text,
                            "truth": "undefined",
                            "reason": str(e),
                        },
                        failed=True,
                    )
                )
                continue
            except TempcollError as e:
                report.diagnostics.append(
                    Diagnostic("error", str(e), cmd.line, 1, source)
                )
                continue
            detail = f"{_operand_text(left)} {cmd.op} {_operand_text(right)}"
            report.commands.append(
                CommandOutcome(
                    "assert",
                    (f"assert #{index}: {str(truth).lower()} ({detail})",),
                    {
                        "kind": "assert",
                        "index": index,
                        "expression": cmd.text,
                        "truth": truth,
                        "op": cmd.op,
                        "left": _value_json(left),
                        "right": _value_json(right),
                        "detail": detail,
                    },
                    failed=not truth,
                )
            )
        elif isinstance(cmd, DisambiguateCommand):
            _run_decision_command(
                report, world, cmd.statement_id, "disambiguate", source, cmd.line
            )
        elif isinstance(cmd, ExplainCommand):
            _run_decision_command(
                report, world, cmd.statement_id, "explain", source, cmd.line
            )


# ---------------------------------------------------------------------------
# Report formatting


def format_report(report: Report, fmt: str = "text") -> str:
    """Render a report; the result always ends with a newline."""
    if fmt == "json":
        document = {
            "status": report.status,
            "commands": [c.data for c in report.commands],
            "diagnostics": [
                {
                    "severity": d.severity,
                    "message": d.message,
                    "line": d.line,
                    "column": d.column,
                    "source": d.source_name,
                }
                for d in report.diagnostics
            ],
        }
        return json.dumps(document, indent=2, ensure_ascii=False) + "\n"
    lines: list[str] = []
    for outcome in report.commands:
        lines.extend(outcome.lines)
    for d in report.diagnostics:
        lines.append(d.render())
    lines.append(f"status: {report.status}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Entry point


def _load_world(report: Report, path: str) -> World | None:
    try:
        text = Path(path).read_text(encoding="utf-8", errors="replace")
    except OSError as e:
        report.diagnostics.append(Diagnostic("error", str(e), 1, 1, path))
        return None
    world, diagnostics = parse_world(text, source_name=path)
    report.diagnostics.extend(diagnostics)
    return world


def _load_script(report: Report, path: str) -> Script | None:
    try:
        text = Path(path).read_text(encoding="utf-8", errors="replace")
    except OSError as e:
        report.diagnostics.append(Diagnostic("error", str(e), 1, 1, path))
        return None
    script, diagnostics = parse_script(text, source_name=path)
    report.diagnostics.extend(diagnostics)
    return script


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tempcoll",
        description="Evaluate temporal collection worlds, scripts, and statements.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--policy", choices=("strict", "lenient"), default="strict")
    common.add_argument(
        "--seed", type=int, default=None, help="reserved for generated-world testing"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser(
        "check", parents=[common], help="parse and validate a world file"
    )
    p_check.add_argument("world")

    p_eval = sub.add_parser("eval", parents=[common], help="run a script against a world")
    p_eval.add_argument("world")
    p_eval.add_argument("script")

    p_dis = sub.add_parser(
        "disambiguate", parents=[common], help="decide the mode of a statement"
    )
    p_dis.add_argument("world")
    p_dis.add_argument("statement_id")

    p_explain = sub.add_parser(
        "explain", parents=[common], help="decide and evaluate every reading"
    )
    p_explain.add_argument("world")
    p_explain.add_argument("statement_id")

    return parser


def run(argv: list[str] | None = None) -> int:
    """Execute one invocation; prints the report to stdout, returns the
    exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse already printed a synopsis to stderr on usage errors
        return 2 if e.code not in (0, None) else int(e.code or 0)

    report = Report()
    world = _load_world(report, args.world)
    if args.command == "check":
        if world is not None:
            report.commands.append(
                CommandOutcome(
                    "check",
                    (
                        f"check {args.world}: ok (entities={len(world.entities)}, "
                        f"predicates={len(world.predicates)}, facts={len(world.facts)}, "
                        f"measures={len(world.measures)}, ticks={len(world.ticks)}, "
                        f"collections={len(world.collections)}, "
                        f"statements={len(world.statements)})",
                    ),
                    {
                        "kind": "check",
                        "source": args.world,
                        "ok": True,
                        "entities": len(world.entities),
                        "predicates": len(world.predicates),
                        "facts": len(world.facts),
                        "measures": len(world.measures),
                        "ticks": len(world.ticks),
                        "collections": len(world.collections),
                        "statements": len(world.statements),
                    },
                )
            )
    elif world is not None:
        if args.command == "eval":
            script = _load_script(report, args.script)
            if script is not None:
                _run_script(report, world, script, args.policy, args.script)
        elif args.command == "disambiguate":
            _run_decision_command(
                report, world, args.statement_id, "disambiguate", args.world, 1
            )
        elif args.command == "explain":
            _run_decision_command(
                report, world, args.statement_id, "explain", args.world, 1
            )

    sys.stdout.write(format_report(report, args.format))
    return exit_code(report)


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
