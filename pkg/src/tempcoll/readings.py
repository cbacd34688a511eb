"""Mode decision and reading evaluation for plural statements.

The default interpretation of a plural subject is de re: the members are
fixed and considered at each evaluation time. Three constraints force a
de dicto interpretation instead, where the subject is re-realized at
every time:

  R1  the statement compares or tracks evolution of a property that is
      fixed per individual, so the comparison cannot concern the same
      members;
  R2  the subject is a cohort: its realizations at the evaluation times
      cannot share members;
  R3  the statement span is longer than the members' possible life
      spans.

R0 records the default when nothing forces; E0 records an explicit mode
written on the statement itself. A decided statement licenses readings:
de dicto yields a ratio evolution; de re yields an individual evolution
plus a global aggregate when the property is a measure, and a
fixed-membership ratio when it is a predicate.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Literal

from .algebra import Instantiation, aggregate_sum, filter_members, instantiate, ratio
from .core import extension, measure_value
from .errors import (
    MalformedStatement,
    MissingMeasure,
    TempcollError,
    UnboundedSpan,
    UnknownCollection,
)
from .model import (
    HOLE,
    MODE_DICTO,
    MODE_RE,
    Collection,
    Mode,
    Statement,
    TimeRef,
    World,
)

__all__ = [
    "FiredRule",
    "Witness",
    "Reading",
    "Decision",
    "LifespanCheck",
    "decide_mode",
    "cohort_disjoint",
    "lifespan_check",
    "enumerate_readings",
    "evaluate_reading",
    "analyze",
]

ReadingKind = Literal["ratio_evolution", "individual_evolution", "global_aggregate"]

_CMP = {"less": "<", "more": ">", "changed": "!="}


@dataclass(frozen=True)
class FiredRule:
    id: str
    justification: str


@dataclass(frozen=True)
class Witness:
    """One supporting or refuting datum: a member, a ratio, or a sum."""

    label: str
    detail: str


@dataclass(frozen=True)
class Reading:
    """A licensed interpretation with its condition and outcome.

    `truth` is None until evaluated; an evaluation that cannot complete
    (missing measure, member without a slice) sets `reason` instead of
    crashing.
    """

    kind: ReadingKind
    mode: Mode
    formula: str
    truth: bool | None = None
    reason: str | None = None
    witnesses: tuple[Witness, ...] = ()

    @property
    def truth_label(self) -> str:
        if self.truth is True:
            return "true"
        if self.truth is False:
            return "false"
        return "undefined" if self.reason is not None else "unevaluated"


@dataclass(frozen=True)
class Decision:
    mode: Mode
    fired_rules: tuple[FiredRule, ...]
    readings: tuple[Reading, ...] = ()

    @property
    def rule_ids(self) -> tuple[str, ...]:
        return tuple(r.id for r in self.fired_rules)


@dataclass(frozen=True)
class LifespanCheck:
    """Outcome of comparing a statement span against a life-span bound."""

    exceeds: bool
    bound: int | None = None
    span_length: int | None = None


def _subject(world: World, stmt: Statement) -> Collection:
    try:
        return world.collection(stmt.subject)
    except UnknownCollection as e:
        raise MalformedStatement(str(e)) from e


def _property_kind(world: World, stmt: Statement) -> Literal["predicate", "measure"]:
    name = stmt.profile.compared_property
    if name in world.predicates:
        return "predicate"
    if name in world.measure_names:
        return "measure"
    raise MalformedStatement(
        f"property '{name}' is neither a declared predicate nor a recorded measure"
    )


def _two_ticks(stmt: Statement) -> tuple[int, int]:
    if len(stmt.eval_times) != 2:
        raise MalformedStatement(
            f"directional evaluation needs exactly two times, got {len(stmt.eval_times)}"
        )
    a, b = (t.tick for t in stmt.eval_times)
    return (a, b) if a < b else (b, a)


def _check_statement(world: World, stmt: Statement) -> Collection:
    if len(stmt.eval_times) < 2:
        raise MalformedStatement("a statement needs at least two evaluation times")
    if any(not t.is_point for t in stmt.eval_times):
        raise MalformedStatement("evaluation times must be single ticks")
    coll = _subject(world, stmt)
    _property_kind(world, stmt)
    return coll


def cohort_disjoint(
    world: World,
    subject: Collection | str | tuple[str, tuple[str, ...]],
    eval_times: tuple[TimeRef, ...],
) -> bool:
    """True iff the subject's realizations at the evaluation times are
    pairwise disjoint and each non-empty.

    Empty realizations prove nothing about re-realization, so they do
    not count as disjoint cohorts.
    """
    if isinstance(subject, str):
        subject = world.collection(subject)
    if isinstance(subject, Collection):
        predicate, pattern = subject.predicate, subject.pattern
    else:
        predicate, pattern = subject
    id_sets = [
        {s.entity_id for s in extension(world, predicate, pattern, t)}
        for t in eval_times
    ]
    if any(not ids for ids in id_sets):
        return False
    for i in range(len(id_sets)):
        for j in range(i + 1, len(id_sets)):
            if id_sets[i] & id_sets[j]:
                return False
    return True


def lifespan_check(world: World, stmt: Statement) -> LifespanCheck:
    """Compare the statement span against the declared species bound, or
    against the longest life span among candidate members when no bound
    is declared.

    An open span exceeds any finite bound; with no finite bound at all it
    raises :class:`UnboundedSpan`.
    """
    coll = _subject(world, stmt)
    span_length = stmt.span.length()
    bound = stmt.species_bound
    if bound is None:
        candidates: set[str] = set()
        for t in stmt.eval_times:
            candidates |= {
                s.entity_id for s in extension(world, coll.predicate, coll.pattern, t)
            }
        lengths = [world.entities[c].lifespan.length() for c in sorted(candidates)]
        if lengths and None not in lengths:
            bound = max(lengths)  # type: ignore[type-var]
        elif lengths:
            # Some candidate lives through an open span: nothing to exceed.
            return LifespanCheck(False, None, span_length)
        elif span_length is None:
            raise UnboundedSpan(
                f"span {stmt.span} is open and no life-span bound is available"
            )
        else:
            return LifespanCheck(False, None, span_length)
    if span_length is None:
        return LifespanCheck(True, bound, None)
    return LifespanCheck(span_length > bound, bound, span_length)


def decide_mode(world: World, stmt: Statement) -> Decision:
    """Decide de re vs de dicto and record every rule that fired.

    Rules are checked in the order R1, R2, R3; any hit forces de dicto
    and all hits are recorded. With no hit, R0 records the de re
    default. An explicit mode on the statement short-circuits as E0.
    """
    coll = _check_statement(world, stmt)
    if stmt.explicit_mode is not None:
        return Decision(
            stmt.explicit_mode,
            (FiredRule("E0", f"mode '{stmt.explicit_mode}' set explicitly on the statement"),),
        )
    fired: list[FiredRule] = []
    prop = stmt.profile.compared_property
    prop_decl = world.predicates.get(prop)
    if stmt.profile.evolutive and prop_decl is not None and prop_decl.invariant:
        fired.append(
            FiredRule(
                "R1",
                f"'{prop}' is fixed per individual over its life span, so the "
                "comparison cannot concern the same members",
            )
        )
    subject_decl = world.predicates[coll.predicate]
    times = ", ".join(str(t) for t in stmt.eval_times)
    if subject_decl.cohort:
        fired.append(
            FiredRule(
                "R2",
                f"'{coll.predicate}' defines a fresh cohort at each time; "
                f"realizations at {times} cannot share members",
            )
        )
    elif cohort_disjoint(world, coll, stmt.eval_times):
        fired.append(
            FiredRule(
                "R2",
                f"realizations of '{coll.predicate}' at {times} share no members",
            )
        )
    try:
        check = lifespan_check(world, stmt)
    except UnboundedSpan:
        check = None
    if check is not None and check.exceeds:
        length = "unbounded" if check.span_length is None else str(check.span_length)
        fired.append(
            FiredRule(
                "R3",
                f"statement span of {length} tick(s) exceeds the life-span "
                f"bound of {check.bound}",
            )
        )
    if fired:
        return Decision(MODE_DICTO, tuple(fired))
    return Decision(
        MODE_RE,
        (
            FiredRule(
                "R0",
                "no forcing constraint applies; membership is read as fixed "
                "(a cohort subject or a life-span conflict would force fresh "
                "realizations per time)",
            ),
        ),
    )


def _effective_collection(world: World, stmt: Statement, mode: Mode) -> Collection:
    """The subject collection coerced to the decided mode.

    A de re decision over a subject declared de dicto anchors at the
    earliest evaluation time; a de dicto decision ignores any declared
    anchor.
    """
    coll = _subject(world, stmt)
    if mode == coll.mode:
        return coll
    if mode == MODE_DICTO:
        return Collection(coll.name, MODE_DICTO, coll.predicate, coll.pattern, None)
    anchor = coll.anchor or TimeRef.point(_two_ticks(stmt)[0])
    return Collection(coll.name, MODE_RE, coll.predicate, coll.pattern, anchor)


def enumerate_readings(world: World, stmt: Statement, mode: Mode) -> tuple[Reading, ...]:
    """The readings licensed by a decided mode, unevaluated.

    De dicto licenses the ratio evolution. De re licenses individual
    evolution plus global aggregate when the property is a measure, and
    only the fixed-membership ratio when it is a predicate (nothing to
    sum without a measure).
    """
    coll = _check_statement(world, stmt)
    kind = _property_kind(world, stmt)
    t1, t2 = _two_ticks(stmt)
    cmp = _CMP[stmt.profile.direction]
    name = coll.name
    prop = stmt.profile.compared_property
    if kind == "predicate":
        pattern = ", ".join(stmt.profile.property_pattern or (HOLE,))
        sub1 = f"{name}@{t1} | {prop}({pattern})"
        sub2 = f"{name}@{t2} | {prop}({pattern})"
        formula = f"ratio({sub2}, {name}@{t2}) {cmp} ratio({sub1}, {name}@{t1})"
        if mode == MODE_RE:
            anchor = _effective_collection(world, stmt, mode).anchor
            formula += f" with membership fixed at {anchor}"
        return (Reading("ratio_evolution", mode, formula),)
    if mode == MODE_DICTO:
        # A measure cannot partition fresh realizations; the ratio reading
        # is still the licensed one and evaluates to undefined.
        formula = (
            f"ratio of members satisfying '{prop}' within {name}@{t2} {cmp} "
            f"the same ratio within {name}@{t1}"
        )
        return (Reading("ratio_evolution", mode, formula),)
    anchor = _effective_collection(world, stmt, mode).anchor
    individual = Reading(
        "individual_evolution",
        mode,
        f"for each member x of {name} fixed at {anchor}: "
        f"{prop}(x@{t2}) {cmp} {prop}(x@{t1})",
    )
    aggregate = Reading(
        "global_aggregate",
        mode,
        f"sum {prop} over {name}@{t2} {cmp} sum {prop} over {name}@{t1}",
    )
    return (individual, aggregate)


def _holds(late: Fraction, early: Fraction, direction: str) -> bool:
    if direction == "less":
        return late < early
    if direction == "more":
        return late > early
    return late != early


def _undefined(reading: Reading, reason: str) -> Reading:
    return replace(reading, truth=None, reason=reason, witnesses=())


def _instantiate_both(
    world: World, coll: Collection, t1: int, t2: int
) -> tuple[Instantiation, Instantiation]:
    """Lenient instantiations at both ticks; a dropped member makes the
    reading undefined, reported by the caller."""
    return (
        instantiate(world, coll, TimeRef.point(t1), "lenient"),
        instantiate(world, coll, TimeRef.point(t2), "lenient"),
    )


def _dropped_reason(inst: Instantiation, world: World) -> str | None:
    if not inst.dropped:
        return None
    entity_id = sorted(inst.dropped)[0]
    lifespan = world.entities[entity_id].lifespan
    return (
        f"member {entity_id} has no slice at {inst.at}: life span is {lifespan}"
    )


def _ratio_witness(part: Instantiation, whole: Instantiation, t: int) -> Witness:
    value = Fraction(len(part.members), len(whole.members))
    detail = f"{len(part.members)}/{len(whole.members)}"
    if str(value) != detail:
        detail += f" = {value}"
    return Witness(f"ratio@{t}", detail)


def _evaluate_ratio(world: World, stmt: Statement, reading: Reading) -> Reading:
    if _property_kind(world, stmt) != "predicate":
        return _undefined(
            reading,
            f"ratio reading needs a predicate property; "
            f"'{stmt.profile.compared_property}' is a measure",
        )
    t1, t2 = _two_ticks(stmt)
    coll = _effective_collection(world, stmt, reading.mode)
    pattern = stmt.profile.property_pattern or (HOLE,)
    try:
        whole1, whole2 = _instantiate_both(world, coll, t1, t2)
        for inst in (whole1, whole2):
            reason = _dropped_reason(inst, world)
            if reason is not None:
                return _undefined(reading, reason)
        part1 = filter_members(world, whole1, stmt.profile.compared_property, pattern)
        part2 = filter_members(world, whole2, stmt.profile.compared_property, pattern)
        early = ratio(part1, whole1)
        late = ratio(part2, whole2)
    except TempcollError as e:
        return _undefined(reading, str(e))
    truth = _holds(late, early, stmt.profile.direction)
    witnesses = (
        _ratio_witness(part1, whole1, t1),
        _ratio_witness(part2, whole2, t2),
    )
    return replace(reading, truth=truth, reason=None, witnesses=witnesses)


def _evaluate_individual(world: World, stmt: Statement, reading: Reading) -> Reading:
    t1, t2 = _two_ticks(stmt)
    measure = stmt.profile.compared_property
    coll = _effective_collection(world, stmt, reading.mode)
    inst1, inst2 = _instantiate_both(world, coll, t1, t2)
    for inst in (inst1, inst2):
        reason = _dropped_reason(inst, world)
        if reason is not None:
            return _undefined(reading, reason)
    if inst1.member_ids() != inst2.member_ids():
        return _undefined(
            reading,
            "membership is not fixed across the evaluation times; "
            "an individual evolution needs a de re subject",
        )
    slices2 = {s.entity_id: s for s in inst2.members}
    cmp = _CMP[stmt.profile.direction]
    supporting: list[Witness] = []
    refuting: list[Witness] = []
    for s1 in inst1.sorted_members():
        s2 = slices2[s1.entity_id]
        try:
            early = measure_value(world, measure, s1)
            late = measure_value(world, measure, s2)
        except MissingMeasure as e:
            return _undefined(reading, str(e))
        if _holds(late, early, stmt.profile.direction):
            supporting.append(Witness(s1.entity_id, f"{late} {cmp} {early}"))
        else:
            refuting.append(Witness(s1.entity_id, f"{late} not {cmp} {early}"))
    if refuting:
        return replace(reading, truth=False, reason=None, witnesses=tuple(refuting))
    return replace(reading, truth=True, reason=None, witnesses=tuple(supporting))


def _evaluate_aggregate(world: World, stmt: Statement, reading: Reading) -> Reading:
    t1, t2 = _two_ticks(stmt)
    measure = stmt.profile.compared_property
    coll = _effective_collection(world, stmt, reading.mode)
    inst1, inst2 = _instantiate_both(world, coll, t1, t2)
    for inst in (inst1, inst2):
        reason = _dropped_reason(inst, world)
        if reason is not None:
            return _undefined(reading, reason)
    try:
        early = aggregate_sum(world, measure, inst1)
        late = aggregate_sum(world, measure, inst2)
    except MissingMeasure as e:
        return _undefined(reading, str(e))
    truth = _holds(late, early, stmt.profile.direction)
    witnesses = (Witness(f"sum@{t1}", str(early)), Witness(f"sum@{t2}", str(late)))
    return replace(reading, truth=truth, reason=None, witnesses=witnesses)


def evaluate_reading(world: World, stmt: Statement, reading: Reading) -> Reading:
    """Evaluate one reading against the world.

    Data gaps (missing measures, members without a slice at a time, an
    empty denominator) come back as an undefined truth with a reason;
    only malformed statements raise.
    """
    _check_statement(world, stmt)
    if reading.kind == "ratio_evolution":
        return _evaluate_ratio(world, stmt, reading)
    if reading.kind == "individual_evolution":
        return _evaluate_individual(world, stmt, reading)
    if reading.kind == "global_aggregate":
        return _evaluate_aggregate(world, stmt, reading)
    raise MalformedStatement(f"unknown reading kind '{reading.kind}'")


def analyze(world: World, stmt: Statement) -> Decision:
    """Decide the mode, enumerate the licensed readings, evaluate each."""
    decision = decide_mode(world, stmt)
    readings = tuple(
        evaluate_reading(world, stmt, r)
        for r in enumerate_readings(world, stmt, decision.mode)
    )
    return replace(decision, readings=readings)
