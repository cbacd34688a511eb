"""Ground operations over a World: slicing, extensions, measure lookup.

These are the primitive queries everything else is built from. A slice
``e@t`` is the stage of entity ``e`` at time ``t``; the extension of a
predicate pattern at ``t`` is the set of slices filling its single hole.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ArityMismatch, MissingMeasure, OutsideLifeSpan
from .model import Policy, Slice, TimeRef, World, hole_index, within

__all__ = ["within", "slice_at", "extension", "measure_value"]


def slice_at(
    world: World, entity_id: str, t: TimeRef, policy: Policy = "strict"
) -> Slice:
    """The slice of `entity_id` at `t`.

    Under strict policy the time must fall inside the entity's life span;
    under lenient policy an outside time yields a slice tagged
    ``out_of_span`` instead of an error.
    """
    entity = world.entity(entity_id)
    inside = within(t, entity.lifespan)
    if not inside and policy == "strict":
        raise OutsideLifeSpan(
            f"{entity_id} has no slice at {t}: life span is {entity.lifespan}"
        )
    return Slice(entity.id, t, invariant=entity.invariant, out_of_span=not inside)


def extension(
    world: World, predicate: str, pattern: tuple[str, ...], t: TimeRef
) -> frozenset[Slice]:
    """All slices ``e@t`` whose entity satisfies `predicate` at `t` in the
    hole position of `pattern`.

    A mutable fact holds exactly at its stated tick. A fact of an
    invariant predicate (stated at any tick, or as always) holds at every
    time inside the member's life span. Only declared entities can fill
    the hole; other symbols are constants and have no slices. Members are
    always clipped to their life spans, so every returned slice is a
    live stage.
    """
    decl = world.predicate(predicate)
    pattern = tuple(pattern)
    if len(pattern) != decl.arity:
        raise ArityMismatch(
            f"arity mismatch: {predicate} takes {decl.arity} argument(s), "
            f"got {len(pattern)}"
        )
    hole = hole_index(pattern)
    members: set[Slice] = set()
    for fact in world.facts_for(predicate):
        if any(
            fact.args[i] != pattern[i] for i in range(len(pattern)) if i != hole
        ):
            continue
        entity = world.entities.get(fact.args[hole])
        if entity is None:
            continue
        if not within(t, entity.lifespan):
            continue
        if fact.at is not None and not decl.invariant and fact.at != t:
            continue
        members.add(Slice(entity.id, t, invariant=entity.invariant))
    return frozenset(members)


def measure_value(world: World, measure: str, s: Slice) -> Fraction:
    """The recorded value of `measure` for the slice's entity at its tick.

    Raises :class:`MissingMeasure` when nothing is recorded; an absent
    value is never read as zero.
    """
    if s.at.is_point:
        value = world.measures.get((measure, s.entity_id, s.at.tick))
        if value is not None:
            return value
    raise MissingMeasure(measure, s.entity_id, s.at)
