"""Set algebra over collection instantiations.

An instantiation ``S@t`` realizes a collection at a time as a set of
slices. De dicto collections are re-extended at every time; de re
collections keep the membership fixed at their anchor and re-slice it,
so their composition never varies, only the stage under consideration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .core import extension, measure_value
from .errors import EmptyDenominator, NotASubset, OutsideLifeSpan, TickMismatch
from .model import (
    MODE_DICTO,
    Collection,
    Policy,
    Slice,
    TimeRef,
    World,
    within,
)

__all__ = [
    "Instantiation",
    "instantiate",
    "filter_members",
    "cardinality",
    "ratio",
    "aggregate_sum",
]


@dataclass(frozen=True)
class Instantiation:
    """The realization of a collection at one time.

    `members` are live slices sharing the tick `at`; `dropped` lists the
    entity ids a lenient de re instantiation had to exclude because their
    life spans do not reach `at`. `label` is a display lineage and never
    takes part in equality.
    """

    source: str
    at: TimeRef
    members: frozenset[Slice]
    dropped: frozenset[str] = frozenset()
    label: str = field(default="", compare=False)

    def member_ids(self) -> frozenset[str]:
        return frozenset(s.entity_id for s in self.members)

    def sorted_members(self) -> list[Slice]:
        return sorted(self.members, key=lambda s: s.entity_id)


def instantiate(
    world: World,
    collection: Collection | str,
    t: TimeRef,
    policy: Policy = "strict",
) -> Instantiation:
    """Realize a collection at time `t`.

    De dicto: a fresh extension at `t`. De re: the membership fixed at
    the anchor, re-sliced at `t`; members not alive at `t` raise under
    strict policy and are reported in `dropped` under lenient policy.
    """
    coll = world.collection(collection) if isinstance(collection, str) else collection
    label = f"{coll.name}@{t}"
    if coll.mode == MODE_DICTO:
        members = extension(world, coll.predicate, coll.pattern, t)
        return Instantiation(coll.name, t, members, frozenset(), label)
    assert coll.anchor is not None
    base = extension(world, coll.predicate, coll.pattern, coll.anchor)
    members: set[Slice] = set()
    dropped: set[str] = set()
    for entity_id in sorted(s.entity_id for s in base):
        entity = world.entities[entity_id]
        if within(t, entity.lifespan):
            members.add(Slice(entity_id, t, invariant=entity.invariant))
        elif policy == "strict":
            raise OutsideLifeSpan(
                f"member {entity_id} of {coll.name} has no slice at {t}: "
                f"life span is {entity.lifespan}"
            )
        else:
            dropped.add(entity_id)
    return Instantiation(coll.name, t, frozenset(members), frozenset(dropped), label)


def filter_members(
    world: World, inst: Instantiation, predicate: str, pattern: tuple[str, ...]
) -> Instantiation:
    """The sub-instantiation of members satisfying `predicate` at the
    instantiation's own time; time, source, and dropped set carry over."""
    keep = {s.entity_id for s in extension(world, predicate, tuple(pattern), inst.at)}
    members = frozenset(s for s in inst.members if s.entity_id in keep)
    label = f"{inst.label or inst.source} | {predicate}({', '.join(pattern)})"
    return Instantiation(inst.source, inst.at, members, inst.dropped, label)


def cardinality(inst: Instantiation) -> int:
    return len(inst.members)


def ratio(part: Instantiation, whole: Instantiation) -> Fraction:
    """card(part)/card(whole) as an exact fraction.

    `part` must be a genuine sub-instantiation of `whole` at the same
    tick; anything else signals an encoding bug, not a zero.
    """
    if part.at != whole.at:
        raise TickMismatch(f"ratio across times: {part.at} vs {whole.at}")
    if not part.members <= whole.members:
        strays = sorted(s.entity_id for s in part.members - whole.members)
        raise NotASubset(
            f"{part.label or part.source} is not a subset of "
            f"{whole.label or whole.source}: {', '.join(strays)}"
        )
    if not whole.members:
        raise EmptyDenominator(f"{whole.label or whole.source} has no members")
    return Fraction(len(part.members), len(whole.members))


def aggregate_sum(world: World, measure: str, inst: Instantiation) -> Fraction:
    """Sum of `measure` over every member; an empty instantiation sums to
    zero, a member without a recorded value raises MissingMeasure."""
    total = Fraction(0)
    for s in inst.sorted_members():
        total += measure_value(world, measure, s)
    return total
