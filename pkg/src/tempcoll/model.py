"""Domain model: time references, entities, slices, facts, and the World.

A World is a closed temporal knowledge base: entities with life spans,
predicate declarations, time-indexed facts, measure facts, named
collections, and plural statements. Construction goes through
:class:`WorldBuilder`, which enforces every structural invariant and
raises a typed error on violation. A built World is immutable and may be
shared freely across threads; every operation in the package is a pure
function of (World, arguments).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Literal

from .errors import (
    ArityMismatch,
    InvalidDeclaration,
    MalformedStatement,
    MultipleHoles,
    UnknownCollection,
    UnknownEntity,
    UnknownPredicate,
    UnknownStatement,
)

HOLE = "_"

Policy = Literal["strict", "lenient"]
Mode = Literal["de_re", "de_dicto"]
Direction = Literal["less", "more", "changed"]

MODE_RE: Mode = "de_re"
MODE_DICTO: Mode = "de_dicto"


@dataclass(frozen=True)
class TimeRef:
    """A temporal reference: a closed interval of integer ticks.

    A point is the degenerate interval [t, t]; ``end is None`` marks an
    open right end. Ticks are abstract units (years in most fixtures,
    but nothing depends on that).
    """

    start: int
    end: int | None

    def __post_init__(self) -> None:
        if self.end is not None and self.end < self.start:
            raise InvalidDeclaration(f"empty interval [{self.start}, {self.end}]")

    @classmethod
    def point(cls, tick: int) -> TimeRef:
        return cls(tick, tick)

    @property
    def is_point(self) -> bool:
        return self.end == self.start

    @property
    def tick(self) -> int:
        """The single tick of a point reference."""
        if not self.is_point:
            raise InvalidDeclaration(f"{self} is not a single tick")
        return self.start

    def length(self) -> int | None:
        """Tick distance end - start, or None when open-ended."""
        return None if self.end is None else self.end - self.start

    def __str__(self) -> str:
        if self.is_point:
            return str(self.start)
        return f"[{self.start}, {'*' if self.end is None else self.end}]"


# An entity's life span is just an interval; the alias marks intent.
LifeSpan = TimeRef


def within(t: TimeRef, span: TimeRef) -> bool:
    """True iff every tick of `t` lies inside `span`.

    Open ends are treated as unbounded: an open `span` end admits any
    future tick, while an open `t` end fits only inside an open span.
    """
    if t.start < span.start:
        return False
    if span.end is None:
        return True
    return t.end is not None and t.end <= span.end


def hole_index(pattern: tuple[str, ...]) -> int:
    """Position of the single hole in an argument pattern."""
    holes = [i for i, a in enumerate(pattern) if a == HOLE]
    if len(holes) != 1:
        raise MultipleHoles(
            f"pattern ({', '.join(pattern)}) needs exactly one '{HOLE}', found {len(holes)}"
        )
    return holes[0]


@dataclass(frozen=True)
class Entity:
    """A named individual with a life span.

    `invariant` marks entities whose stages are indistinguishable across
    time: all their slices compare equal.
    """

    id: str
    lifespan: LifeSpan
    invariant: bool = False
    species: str | None = None


@dataclass(frozen=True, eq=False)
class Slice:
    """A stage of an entity at a time, written ``e@t``.

    Two slices are equal iff they are stages of the same entity at the
    same time, or the entity is invariant (then all its stages are one).
    `out_of_span` tags slices produced by lenient slicing outside the
    entity's life span; it never participates in equality.
    """

    entity_id: str
    at: TimeRef
    invariant: bool = False
    out_of_span: bool = False

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Slice):
            return NotImplemented
        if self.entity_id != other.entity_id:
            return False
        return self.invariant or self.at == other.at

    def __hash__(self) -> int:
        # Invariant slices must collapse to one hash bucket per entity.
        if self.invariant:
            return hash((self.entity_id, "invariant"))
        return hash((self.entity_id, self.at))

    def __str__(self) -> str:
        return f"{self.entity_id}@{self.at}"


@dataclass(frozen=True)
class PredicateDecl:
    """A predicate with arity and temporal profile.

    `invariant` means the truth value is fixed per argument tuple over
    each subject's life span; `cohort` marks defining predicates whose
    extensions at distinct evaluation times are necessarily disjoint
    (e.g. being exactly eighteen).
    """

    name: str
    arity: int
    invariant: bool = False
    cohort: bool = False


@dataclass(frozen=True)
class Fact:
    """A ground atom holding at a tick, or always (``at is None``).

    `always` is only legal for invariant predicates and is clipped to the
    subject's life span when queried.
    """

    predicate: str
    args: tuple[str, ...]
    at: TimeRef | None = None


@dataclass(frozen=True)
class MeasureFact:
    """An exact quantity attached to one entity at one tick."""

    measure: str
    entity_id: str
    at: TimeRef
    value: Fraction


@dataclass(frozen=True)
class Collection:
    """A named intensional collection over one predicate pattern.

    De dicto collections get a fresh realization at every time; de re
    collections fix their membership at `anchor` and re-slice those same
    members at other times.
    """

    name: str
    mode: Mode
    predicate: str
    pattern: tuple[str, ...]
    anchor: TimeRef | None = None


@dataclass(frozen=True)
class PredicationProfile:
    """How a statement predicates over its subject.

    `compared_property` names either a declared predicate (with an
    argument pattern when its arity exceeds one) or a recorded measure.
    """

    evolutive: bool
    compared_property: str
    direction: Direction
    property_pattern: tuple[str, ...] | None = None


@dataclass(frozen=True)
class Statement:
    """A plural statement evaluated over at least two situations."""

    id: str
    subject: str
    profile: PredicationProfile
    eval_times: tuple[TimeRef, ...]
    span: TimeRef
    species_bound: int | None = None
    explicit_mode: Mode | None = None


def _fact_key(f: Fact) -> tuple:
    return (f.predicate, f.args, f.at is not None, f.at.start if f.at else 0)


@dataclass(frozen=True)
class World:
    """An immutable knowledge base; equality is structural."""

    entities: dict[str, Entity] = field(default_factory=dict)
    predicates: dict[str, PredicateDecl] = field(default_factory=dict)
    facts: tuple[Fact, ...] = ()
    measures: dict[tuple[str, str, int], Fraction] = field(default_factory=dict)
    collections: dict[str, Collection] = field(default_factory=dict)
    statements: dict[str, Statement] = field(default_factory=dict)

    @cached_property
    def _facts_by_predicate(self) -> dict[str, tuple[Fact, ...]]:
        index: dict[str, list[Fact]] = {}
        for f in self.facts:
            index.setdefault(f.predicate, []).append(f)
        return {name: tuple(fs) for name, fs in index.items()}

    def facts_for(self, predicate: str) -> tuple[Fact, ...]:
        return self._facts_by_predicate.get(predicate, ())

    @cached_property
    def ticks(self) -> tuple[int, ...]:
        """Distinct ticks mentioned by point facts and measures, sorted."""
        seen = {f.at.tick for f in self.facts if f.at is not None}
        seen.update(tick for (_, _, tick) in self.measures)
        return tuple(sorted(seen))

    @cached_property
    def measure_names(self) -> frozenset[str]:
        return frozenset(m for (m, _, _) in self.measures)

    def measure_facts(self) -> tuple[MeasureFact, ...]:
        return tuple(
            MeasureFact(m, e, TimeRef.point(tick), v)
            for (m, e, tick), v in sorted(self.measures.items())
        )

    def entity(self, entity_id: str) -> Entity:
        try:
            return self.entities[entity_id]
        except KeyError:
            raise UnknownEntity(f"unknown entity '{entity_id}'") from None

    def predicate(self, name: str) -> PredicateDecl:
        try:
            return self.predicates[name]
        except KeyError:
            raise UnknownPredicate(f"unknown predicate '{name}'") from None

    def collection(self, name: str) -> Collection:
        try:
            return self.collections[name]
        except KeyError:
            raise UnknownCollection(f"unknown collection '{name}'") from None

    def statement(self, statement_id: str) -> Statement:
        try:
            return self.statements[statement_id]
        except KeyError:
            raise UnknownStatement(f"unknown statement '{statement_id}'") from None


class WorldBuilder:
    """Accumulates declarations, validating each against what is known.

    Order matters only across kinds: facts and measures need their
    predicates and entities first, collections their predicates,
    statements their subject collections and properties. The DSL loader
    feeds records in that order; programmatic callers should too.
    """

    def __init__(self) -> None:
        self._entities: dict[str, Entity] = {}
        self._predicates: dict[str, PredicateDecl] = {}
        self._facts: set[Fact] = set()
        self._measures: dict[tuple[str, str, int], Fraction] = {}
        self._collections: dict[str, Collection] = {}
        self._statements: dict[str, Statement] = {}

    def add_entity(
        self,
        entity_id: str,
        lifespan: LifeSpan,
        *,
        invariant: bool = False,
        species: str | None = None,
    ) -> None:
        if entity_id in self._entities:
            raise InvalidDeclaration(f"duplicate entity id '{entity_id}'")
        self._entities[entity_id] = Entity(entity_id, lifespan, invariant, species)

    def add_predicate(
        self, name: str, arity: int, *, invariant: bool = False, cohort: bool = False
    ) -> None:
        if name in self._predicates:
            raise InvalidDeclaration(f"duplicate predicate '{name}'")
        if arity < 1:
            raise InvalidDeclaration(f"predicate '{name}' needs arity >= 1")
        self._predicates[name] = PredicateDecl(name, arity, invariant, cohort)

    def add_fact(self, predicate: str, args: Iterable[str], at: TimeRef | None) -> None:
        args = tuple(args)
        decl = self._predicates.get(predicate)
        if decl is None:
            raise UnknownPredicate(f"unknown predicate '{predicate}' in fact")
        if len(args) != decl.arity:
            raise ArityMismatch(
                f"arity mismatch: {predicate} takes {decl.arity} argument(s), got {len(args)}"
            )
        if HOLE in args:
            raise InvalidDeclaration(f"facts are ground; '{HOLE}' is not an argument")
        if at is None and not decl.invariant:
            raise InvalidDeclaration(
                f"'always' fact needs an invariant predicate; '{predicate}' is mutable"
            )
        if at is not None and not at.is_point:
            raise InvalidDeclaration("fact time must be a single tick or '*'")
        self._facts.add(Fact(predicate, args, at))

    def add_measure(
        self, measure: str, entity_id: str, at: TimeRef, value: Fraction
    ) -> None:
        if measure in self._predicates:
            raise InvalidDeclaration(f"'{measure}' is already a predicate name")
        if entity_id not in self._entities:
            raise UnknownEntity(f"unknown entity '{entity_id}' in measure")
        if not at.is_point:
            raise InvalidDeclaration("measure time must be a single tick")
        if value < 0:
            raise InvalidDeclaration(f"measure value must be non-negative, got {value}")
        key = (measure, entity_id, at.tick)
        known = self._measures.get(key)
        if known is not None and known != value:
            raise InvalidDeclaration(
                f"conflicting values for {measure}({entity_id}) @ {at.tick}: {known} vs {value}"
            )
        self._measures[key] = value

    def add_collection(
        self,
        name: str,
        mode: Mode,
        predicate: str,
        pattern: Iterable[str],
        anchor: TimeRef | None = None,
    ) -> None:
        pattern = tuple(pattern)
        if name in self._collections:
            raise InvalidDeclaration(f"duplicate collection '{name}'")
        decl = self._predicates.get(predicate)
        if decl is None:
            raise UnknownPredicate(f"unknown predicate '{predicate}' in collection '{name}'")
        if len(pattern) != decl.arity:
            raise ArityMismatch(
                f"arity mismatch: {predicate} takes {decl.arity} argument(s), got {len(pattern)}"
            )
        hole_index(pattern)
        if mode == MODE_RE:
            if anchor is None:
                raise InvalidDeclaration(f"de re collection '{name}' needs an anchor time")
            if not anchor.is_point:
                raise InvalidDeclaration(f"anchor of collection '{name}' must be a single tick")
        elif mode == MODE_DICTO:
            if anchor is not None:
                raise InvalidDeclaration(f"de dicto collection '{name}' takes no anchor")
        else:
            raise InvalidDeclaration(f"unknown collection mode '{mode}'")
        self._collections[name] = Collection(name, mode, predicate, pattern, anchor)

    def add_statement(
        self,
        statement_id: str,
        subject: str,
        *,
        evolutive: bool,
        compared_property: str,
        direction: Direction,
        eval_times: Iterable[int | TimeRef],
        span: TimeRef,
        property_pattern: Iterable[str] | None = None,
        species_bound: int | None = None,
        explicit_mode: Mode | None = None,
    ) -> None:
        if statement_id in self._statements:
            raise InvalidDeclaration(f"duplicate statement '{statement_id}'")
        if subject not in self._collections:
            raise UnknownCollection(f"unknown subject collection '{subject}'")
        times = tuple(
            t if isinstance(t, TimeRef) else TimeRef.point(t) for t in eval_times
        )
        if len(times) < 2:
            raise MalformedStatement("a statement needs at least two evaluation times")
        if any(not t.is_point for t in times):
            raise MalformedStatement("evaluation times must be single ticks")
        if len({t.tick for t in times}) != len(times):
            raise MalformedStatement("evaluation times must be distinct")
        for t in times:
            if not within(t, span):
                raise MalformedStatement(f"span {span} does not cover evaluation time {t}")
        pattern = tuple(property_pattern) if property_pattern is not None else None
        decl = self._predicates.get(compared_property)
        measure_names = {m for (m, _, _) in self._measures}
        if decl is not None:
            if pattern is None:
                if decl.arity != 1:
                    raise MalformedStatement(
                        f"property '{compared_property}' has arity {decl.arity}; "
                        "give an argument pattern"
                    )
                pattern = (HOLE,)
            else:
                if len(pattern) != decl.arity:
                    raise ArityMismatch(
                        f"arity mismatch: {compared_property} takes {decl.arity} "
                        f"argument(s), got {len(pattern)}"
                    )
                hole_index(pattern)
        elif compared_property in measure_names:
            if pattern is not None:
                raise MalformedStatement(
                    f"'{compared_property}' is a measure; it takes no argument pattern"
                )
        else:
            raise MalformedStatement(
                f"property '{compared_property}' is neither a declared predicate "
                "nor a recorded measure"
            )
        if direction not in ("less", "more", "changed"):
            raise MalformedStatement(f"unknown direction '{direction}'")
        if species_bound is not None and species_bound < 1:
            raise MalformedStatement("species bound must be a positive tick count")
        if explicit_mode not in (None, MODE_RE, MODE_DICTO):
            raise MalformedStatement(f"unknown mode '{explicit_mode}'")
        profile = PredicationProfile(evolutive, compared_property, direction, pattern)
        self._statements[statement_id] = Statement(
            statement_id, subject, profile, times, span, species_bound, explicit_mode
        )

    def build(self) -> World:
        return World(
            entities=dict(self._entities),
            predicates=dict(self._predicates),
            facts=tuple(sorted(self._facts, key=_fact_key)),
            measures=dict(self._measures),
            collections=dict(self._collections),
            statements=dict(self._statements),
        )
