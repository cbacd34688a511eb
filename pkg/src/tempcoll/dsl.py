"""Text formats: world files (.tcw), script files (.tcq), and rendering.

Both formats are line-oriented; `;` starts a comment. World files hold
declarations (entities, predicates, facts, measures, collections,
statements), script files hold commands (eval, assert, disambiguate,
explain). Parsing never raises: every problem becomes a positioned
Diagnostic, and a world is only produced when no error was seen.

World grammar, one declaration per line:

    entity ID lifespan [TICK, TICK|*] [invariant] [species ID]
    pred ID arity INT (mutable|invariant) [cohort]
    fact ID(ARGS) @ (TICK|*)
    measure ID(ID) @ TICK = RATIONAL
    collection ID (dicto|re@TICK) := ID(PATTERN)
    statement ID subject ID profile (evolutive|static) property ID[(PATTERN)]
        direction (less|more|changed) times TICK, TICK span [TICK, TICK|*]
        [bound INT] [mode (re|dicto)]

Script grammar:

    eval EXPR
    assert EXPR (<|>|=) EXPR
    disambiguate ID
    explain ID
    EXPR := card(INST) | ratio(INST, INST) | sum ID over INST | INST
    INST := ID @ TICK [| ID(PATTERN)]
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Literal

from .errors import TempcollError
from .model import (
    HOLE,
    MODE_DICTO,
    MODE_RE,
    Mode,
    TimeRef,
    World,
    WorldBuilder,
    within,
)

__all__ = [
    "Diagnostic",
    "Script",
    "InstExpr",
    "CardExpr",
    "RatioExpr",
    "SumExpr",
    "EvalCommand",
    "AssertCommand",
    "DisambiguateCommand",
    "ExplainCommand",
    "parse_world",
    "parse_script",
    "render_world",
]


@dataclass(frozen=True)
class Diagnostic:
    severity: Literal["error", "warning"]
    message: str
    line: int
    column: int
    source_name: str

    def render(self) -> str:
        return f"{self.source_name}:{self.line}:{self.column}: {self.severity}: {self.message}"


# ---------------------------------------------------------------------------
# Script AST


@dataclass(frozen=True)
class InstExpr:
    collection: str
    at: TimeRef
    filter_predicate: str | None = None
    filter_pattern: tuple[str, ...] | None = None


@dataclass(frozen=True)
class CardExpr:
    inst: InstExpr


@dataclass(frozen=True)
class RatioExpr:
    part: InstExpr
    whole: InstExpr


@dataclass(frozen=True)
class SumExpr:
    measure: str
    inst: InstExpr


Expr = InstExpr | CardExpr | RatioExpr | SumExpr


@dataclass(frozen=True)
class EvalCommand:
    expr: Expr
    line: int
    text: str


@dataclass(frozen=True)
class AssertCommand:
    left: Expr
    op: Literal["<", ">", "="]
    right: Expr
    line: int
    text: str


@dataclass(frozen=True)
class DisambiguateCommand:
    statement_id: str
    line: int
    text: str


@dataclass(frozen=True)
class ExplainCommand:
    statement_id: str
    line: int
    text: str


Command = EvalCommand | AssertCommand | DisambiguateCommand | ExplainCommand


@dataclass(frozen=True)
class Script:
    commands: tuple[Command, ...]


# ---------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>;.*)
      | (?P<rational>-?\d+/\d+)
      | (?P<decimal>-?\d+\.\d+)
      | (?P<int>-?\d+)
      | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<punct>:=|[()\[\],@=|<>*])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    column: int  # 1-based


class _LineError(Exception):
    def __init__(self, message: str, column: int) -> None:
        super().__init__(message)
        self.message = message
        self.column = column


def _tokenize(line: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(line):
        m = _TOKEN_RE.match(line, pos)
        if m is None:
            raise _LineError(f"unexpected character {line[pos]!r}", pos + 1)
        kind = m.lastgroup or ""
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, m.group(), pos + 1))
        pos = m.end()
    return tokens


class _Cursor:
    def __init__(self, tokens: list[_Token], line_length: int) -> None:
        self._tokens = tokens
        self._idx = 0
        self._end_column = line_length + 1

    def done(self) -> bool:
        return self._idx >= len(self._tokens)

    def peek(self) -> _Token | None:
        return self._tokens[self._idx] if not self.done() else None

    def column(self) -> int:
        tok = self.peek()
        return tok.column if tok else self._end_column

    def take(self, what: str) -> _Token:
        tok = self.peek()
        if tok is None:
            raise _LineError(f"expected {what} at end of line", self._end_column)
        self._idx += 1
        return tok

    def expect_punct(self, text: str) -> _Token:
        tok = self.take(f"'{text}'")
        if tok.kind != "punct" or tok.text != text:
            raise _LineError(f"expected '{text}', got {tok.text!r}", tok.column)
        return tok

    def expect_id(self) -> _Token:
        tok = self.take("a name")
        if tok.kind != "id":
            raise _LineError(f"expected a name, got {tok.text!r}", tok.column)
        return tok

    def expect_keyword(self, *words: str) -> _Token:
        tok = self.take(" or ".join(f"'{w}'" for w in words))
        if tok.kind != "id" or tok.text not in words:
            expected = " or ".join(f"'{w}'" for w in words)
            raise _LineError(f"expected {expected}, got {tok.text!r}", tok.column)
        return tok

    def expect_int(self) -> int:
        tok = self.take("an integer")
        if tok.kind != "int":
            raise _LineError(f"expected an integer, got {tok.text!r}", tok.column)
        return int(tok.text)

    def accept_punct(self, text: str) -> bool:
        tok = self.peek()
        if tok is not None and tok.kind == "punct" and tok.text == text:
            self._idx += 1
            return True
        return False

    def accept_keyword(self, word: str) -> bool:
        tok = self.peek()
        if tok is not None and tok.kind == "id" and tok.text == word:
            self._idx += 1
            return True
        return False

    def expect_end(self) -> None:
        tok = self.peek()
        if tok is not None:
            raise _LineError(f"unexpected trailing input {tok.text!r}", tok.column)


def _parse_interval(cur: _Cursor) -> TimeRef:
    opening = cur.expect_punct("[")
    start = cur.expect_int()
    cur.expect_punct(",")
    if cur.accept_punct("*"):
        end: int | None = None
    else:
        end = cur.expect_int()
    cur.expect_punct("]")
    try:
        return TimeRef(start, end)
    except TempcollError as e:
        raise _LineError(str(e), opening.column) from e


def _parse_args(cur: _Cursor, *, allow_hole: bool) -> tuple[str, ...]:
    opening = cur.expect_punct("(")
    args: list[str] = []
    if not cur.accept_punct(")"):
        while True:
            tok = cur.peek()
            if tok is None:
                raise _LineError("unbalanced '('", opening.column)
            if tok.kind != "id":
                raise _LineError(f"expected an argument, got {tok.text!r}", tok.column)
            if tok.text == HOLE and not allow_hole:
                raise _LineError(f"'{HOLE}' is not allowed here", tok.column)
            args.append(tok.text)
            cur.take("argument")
            if cur.accept_punct(")"):
                break
            if not cur.accept_punct(","):
                raise _LineError("unbalanced '('", opening.column)
    return tuple(args)


def _parse_rational(cur: _Cursor) -> Fraction:
    tok = cur.take("a rational number")
    if tok.kind not in ("int", "rational", "decimal"):
        raise _LineError(f"expected a rational number, got {tok.text!r}", tok.column)
    try:
        return Fraction(tok.text)
    except (ValueError, ZeroDivisionError) as e:
        raise _LineError(f"bad rational literal {tok.text!r}", tok.column) from e


# ---------------------------------------------------------------------------
# World parsing

# One record per parsed declaration: an apply-to-builder closure plus an
# optional post-build lint returning a warning message.
_Apply = Callable[[WorldBuilder], None]
_Check = Callable[[World], "str | None"]
_Parsed = tuple[_Apply, "_Check | None"]
_Record = tuple[_Apply, int, int]


def _parse_entity(cur: _Cursor) -> _Parsed:
    entity_id = cur.expect_id().text
    cur.expect_keyword("lifespan")
    lifespan = _parse_interval(cur)
    invariant = cur.accept_keyword("invariant")
    species = None
    if cur.accept_keyword("species"):
        species = cur.expect_id().text
    cur.expect_end()
    return (
        lambda b: b.add_entity(entity_id, lifespan, invariant=invariant, species=species),
        None,
    )


def _parse_predicate(cur: _Cursor) -> _Parsed:
    name = cur.expect_id().text
    cur.expect_keyword("arity")
    arity = cur.expect_int()
    profile = cur.expect_keyword("mutable", "invariant").text
    cohort = cur.accept_keyword("cohort")
    cur.expect_end()
    return (
        lambda b: b.add_predicate(
            name, arity, invariant=profile == "invariant", cohort=cohort
        ),
        None,
    )


def _parse_fact(cur: _Cursor) -> _Parsed:
    name = cur.expect_id().text
    args = _parse_args(cur, allow_hole=False)
    cur.expect_punct("@")
    if cur.accept_punct("*"):
        at: TimeRef | None = None
    else:
        at = TimeRef.point(cur.expect_int())
    cur.expect_end()

    def lint(world: World) -> str | None:
        if at is None:
            return None
        for arg in args:
            entity = world.entities.get(arg)
            if entity is not None and not within(at, entity.lifespan):
                return (
                    f"fact {name}({', '.join(args)}) @ {at} falls outside the "
                    f"life span of {arg} ({entity.lifespan})"
                )
        return None

    return lambda b: b.add_fact(name, args, at), lint


def _parse_measure(cur: _Cursor) -> _Parsed:
    name = cur.expect_id().text
    args = _parse_args(cur, allow_hole=False)
    if len(args) != 1:
        raise _LineError("a measure is recorded for exactly one entity", cur.column())
    cur.expect_punct("@")
    at = TimeRef.point(cur.expect_int())
    cur.expect_punct("=")
    value = _parse_rational(cur)
    cur.expect_end()
    return lambda b: b.add_measure(name, args[0], at, value), None


def _parse_collection(cur: _Cursor) -> _Parsed:
    name = cur.expect_id().text
    mode_tok = cur.expect_keyword("dicto", "re")
    anchor: TimeRef | None = None
    mode: Mode = MODE_DICTO
    if mode_tok.text == "re":
        mode = MODE_RE
        if not cur.accept_punct("@"):
            raise _LineError(
                f"de re collection '{name}' needs an anchor: re@TICK", mode_tok.column
            )
        anchor = TimeRef.point(cur.expect_int())
    cur.expect_punct(":=")
    predicate = cur.expect_id().text
    pattern = _parse_args(cur, allow_hole=True)
    cur.expect_end()
    return lambda b: b.add_collection(name, mode, predicate, pattern, anchor), None


def _parse_statement(cur: _Cursor) -> _Parsed:
    statement_id = cur.expect_id().text
    cur.expect_keyword("subject")
    subject = cur.expect_id().text
    cur.expect_keyword("profile")
    evolutive = cur.expect_keyword("evolutive", "static").text == "evolutive"
    cur.expect_keyword("property")
    compared = cur.expect_id().text
    pattern: tuple[str, ...] | None = None
    tok = cur.peek()
    if tok is not None and tok.kind == "punct" and tok.text == "(":
        pattern = _parse_args(cur, allow_hole=True)
    cur.expect_keyword("direction")
    direction = cur.expect_keyword("less", "more", "changed").text
    cur.expect_keyword("times")
    t1 = cur.expect_int()
    cur.expect_punct(",")
    t2 = cur.expect_int()
    cur.expect_keyword("span")
    span = _parse_interval(cur)
    bound = None
    if cur.accept_keyword("bound"):
        bound = cur.expect_int()
    explicit_mode: Mode | None = None
    if cur.accept_keyword("mode"):
        explicit_mode = (
            MODE_RE if cur.expect_keyword("re", "dicto").text == "re" else MODE_DICTO
        )
    cur.expect_end()

    def apply(b: WorldBuilder) -> None:
        b.add_statement(
            statement_id,
            subject,
            evolutive=evolutive,
            compared_property=compared,
            direction=direction,  # type: ignore[arg-type]
            eval_times=(t1, t2),
            span=span,
            property_pattern=pattern,
            species_bound=bound,
            explicit_mode=explicit_mode,
        )

    return apply, None


_LINE_PARSERS: dict[str, Callable[[_Cursor], _Parsed]] = {
    "entity": _parse_entity,
    "pred": _parse_predicate,
    "fact": _parse_fact,
    "measure": _parse_measure,
    "collection": _parse_collection,
    "statement": _parse_statement,
}

# Dependency order for the build phase; within a kind, file order.
_BUILD_ORDER = ("entity", "pred", "fact", "measure", "collection", "statement")


def parse_world(
    text: str, source_name: str = "<world>"
) -> tuple[World | None, list[Diagnostic]]:
    """Parse a world file.

    Returns (world, diagnostics); the world is None iff any diagnostic
    is an error. Warnings (facts timed outside their subject's life
    span) do not block the build.
    """
    diagnostics: list[Diagnostic] = []
    records: dict[str, list[_Record]] = {kind: [] for kind in _BUILD_ORDER}
    checks: list[tuple[Callable[[World], str | None], int, int]] = []

    def error(message: str, line: int, column: int) -> None:
        diagnostics.append(Diagnostic("error", message, line, column, source_name))

    for lineno, line in enumerate(text.splitlines(), start=1):
        try:
            tokens = _tokenize(line)
        except _LineError as e:
            error(e.message, lineno, e.column)
            continue
        if not tokens:
            continue
        head = tokens[0]
        cur = _Cursor(tokens, len(line))
        if head.kind != "id" or head.text not in _LINE_PARSERS:
            error(f"unknown declaration {head.text!r}", lineno, head.column)
            continue
        cur.take("keyword")
        try:
            apply, check = _LINE_PARSERS[head.text](cur)
        except _LineError as e:
            error(e.message, lineno, e.column)
            continue
        records[head.text].append((apply, lineno, head.column))
        if check is not None:
            checks.append((check, lineno, head.column))

    builder = WorldBuilder()
    for kind in _BUILD_ORDER:
        for apply, lineno, column in records[kind]:
            try:
                apply(builder)
            except TempcollError as e:
                error(str(e), lineno, column)

    diagnostics.sort(key=lambda d: (d.line, d.column))
    if any(d.severity == "error" for d in diagnostics):
        return None, diagnostics
    world = builder.build()
    for check, lineno, column in checks:
        message = check(world)
        if message is not None:
            diagnostics.append(
                Diagnostic("warning", message, lineno, column, source_name)
            )
    diagnostics.sort(key=lambda d: (d.line, d.column))
    return world, diagnostics


# ---------------------------------------------------------------------------
# Script parsing


def _parse_inst(cur: _Cursor) -> InstExpr:
    name = cur.expect_id().text
    cur.expect_punct("@")
    at = TimeRef.point(cur.expect_int())
    if cur.accept_punct("|"):
        predicate = cur.expect_id().text
        pattern = _parse_args(cur, allow_hole=True)
        return InstExpr(name, at, predicate, pattern)
    return InstExpr(name, at)


def _parse_parenthesized(cur: _Cursor, parse_body: Callable[[_Cursor], object]) -> object:
    # A body that dies at end of line means the '(' was never closed;
    # report that at the opening column, as mid-line errors stay put.
    opening = cur.expect_punct("(")
    try:
        body = parse_body(cur)
    except _LineError as e:
        if cur.done():
            raise _LineError("unbalanced '('", opening.column) from e
        raise
    if not cur.accept_punct(")"):
        raise _LineError("unbalanced '('", opening.column)
    return body


def _parse_expr(cur: _Cursor) -> Expr:
    tok = cur.peek()
    if tok is None:
        raise _LineError("expected an expression at end of line", cur.column())
    if tok.kind == "id" and tok.text == "card":
        cur.take("card")
        inst = _parse_parenthesized(cur, _parse_inst)
        assert isinstance(inst, InstExpr)
        return CardExpr(inst)
    if tok.kind == "id" and tok.text == "ratio":
        cur.take("ratio")

        def pair(c: _Cursor) -> tuple[InstExpr, InstExpr]:
            part = _parse_inst(c)
            c.expect_punct(",")
            return part, _parse_inst(c)

        part, whole = _parse_parenthesized(cur, pair)  # type: ignore[misc]
        return RatioExpr(part, whole)
    if tok.kind == "id" and tok.text == "sum":
        cur.take("sum")
        measure = cur.expect_id().text
        cur.expect_keyword("over")
        return SumExpr(measure, _parse_inst(cur))
    return _parse_inst(cur)


def parse_script(
    text: str, source_name: str = "<script>"
) -> tuple[Script | None, list[Diagnostic]]:
    """Parse a script file into an ordered command list.

    Statement and collection references are resolved later, against a
    loaded world; here only the syntax is checked.
    """
    diagnostics: list[Diagnostic] = []
    commands: list[Command] = []

    for lineno, line in enumerate(text.splitlines(), start=1):
        try:
            tokens = _tokenize(line)
        except _LineError as e:
            diagnostics.append(Diagnostic("error", e.message, lineno, e.column, source_name))
            continue
        if not tokens:
            continue
        head = tokens[0]
        cur = _Cursor(tokens, len(line))
        stripped = line.split(";")[0].strip()
        try:
            if head.kind != "id":
                raise _LineError(f"unknown command {head.text!r}", head.column)
            cur.take("command")
            if head.text == "eval":
                expr = _parse_expr(cur)
                cur.expect_end()
                commands.append(EvalCommand(expr, lineno, stripped))
            elif head.text == "assert":
                left = _parse_expr(cur)
                op_tok = cur.take("a comparison (<, > or =)")
                if op_tok.kind != "punct" or op_tok.text not in ("<", ">", "="):
                    raise _LineError(
                        f"expected '<', '>' or '=', got {op_tok.text!r}", op_tok.column
                    )
                right = _parse_expr(cur)
                cur.expect_end()
                commands.append(
                    AssertCommand(left, op_tok.text, right, lineno, stripped)  # type: ignore[arg-type]
                )
            elif head.text == "disambiguate":
                statement_id = cur.expect_id().text
                cur.expect_end()
                commands.append(DisambiguateCommand(statement_id, lineno, stripped))
            elif head.text == "explain":
                statement_id = cur.expect_id().text
                cur.expect_end()
                commands.append(ExplainCommand(statement_id, lineno, stripped))
            else:
                raise _LineError(f"unknown command {head.text!r}", head.column)
        except _LineError as e:
            diagnostics.append(Diagnostic("error", e.message, lineno, e.column, source_name))

    if any(d.severity == "error" for d in diagnostics):
        return None, diagnostics
    return Script(tuple(commands)), diagnostics


# ---------------------------------------------------------------------------
# Rendering


def _render_interval(t: TimeRef) -> str:
    return f"[{t.start}, {'*' if t.end is None else t.end}]"


def render_world(world: World) -> str:
    """Canonical text for a world: sections in a fixed order, each sorted,
    so that semantically equal worlds render byte-identically and
    ``parse(render(w)) == w``."""
    lines: list[str] = []
    for entity in sorted(world.entities.values(), key=lambda e: e.id):
        line = f"entity {entity.id} lifespan {_render_interval(entity.lifespan)}"
        if entity.invariant:
            line += " invariant"
        if entity.species is not None:
            line += f" species {entity.species}"
        lines.append(line)
    for decl in sorted(world.predicates.values(), key=lambda p: p.name):
        line = (
            f"pred {decl.name} arity {decl.arity} "
            f"{'invariant' if decl.invariant else 'mutable'}"
        )
        if decl.cohort:
            line += " cohort"
        lines.append(line)
    for fact in world.facts:  # already canonically sorted by the builder
        at = "*" if fact.at is None else str(fact.at.tick)
        lines.append(f"fact {fact.predicate}({', '.join(fact.args)}) @ {at}")
    for mf in world.measure_facts():
        lines.append(
            f"measure {mf.measure}({mf.entity_id}) @ {mf.at.tick} = {mf.value}"
        )
    for coll in sorted(world.collections.values(), key=lambda c: c.name):
        mode = "dicto" if coll.mode == MODE_DICTO else f"re@{coll.anchor}"
        lines.append(
            f"collection {coll.name} {mode} := {coll.predicate}({', '.join(coll.pattern)})"
        )
    for stmt in sorted(world.statements.values(), key=lambda s: s.id):
        prop = stmt.profile.compared_property
        if stmt.profile.property_pattern is not None:
            prop += f"({', '.join(stmt.profile.property_pattern)})"
        ticks = ", ".join(str(t.tick) for t in stmt.eval_times)
        line = (
            f"statement {stmt.id} subject {stmt.subject} "
            f"profile {'evolutive' if stmt.profile.evolutive else 'static'} "
            f"property {prop} direction {stmt.profile.direction} "
            f"times {ticks} span {_render_interval(stmt.span)}"
        )
        if stmt.species_bound is not None:
            line += f" bound {stmt.species_bound}"
        if stmt.explicit_mode is not None:
            line += f" mode {'re' if stmt.explicit_mode == MODE_RE else 'dicto'}"
        lines.append(line)
    return "\n".join(lines) + ("\n" if lines else "")
