"""
Commuting systems of inclusions: one chosen object per component and one
inclusion map per proper containment c̄ ⊂ d̄, with ι_{d,e} ∘ ι_{c,d} = ι_{c,e}
over every chain c̄ ⊂ d̄ ⊂ ē.

Systems are built one base point at a time. When a point a joins the points
P, the only free choices are the maps into the new top object O_{P∪a}: one
from the old top O_P and one from each new subset containing a. Everything
else is forced: old subsets reach the new top through O_P, and each map into
a smaller new subset is the unique square filler over the new top. Free
choices take the lexicographically least morphism id and are logged so that
a ChoiceLog can replay or alter them. Groupoids truncated below |P| + 1 have
no new top; their new maps are found by a constrained search instead.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Any, Iterable, Mapping

from modules.ElementMap import Arrow
from modules.Errors import InconsistentSeedError, PreconditionError, UnknownIdentifierError
from modules.SimplicialGroupoid import SimplicialGroupoid, fill_square, label_subset, nonempty_subsets, subset_label
from modules.ValidationReport import ValidationReport

logger = logging.getLogger(__name__)


def map_key(small: str, big: str) -> str:
    return f"{small}|{big}"


def parse_map_key(key: str) -> tuple[str, str]:
    small, _, big = key.partition("|")
    return small, big


@dataclass
class ChoiceLog:
    """Free choices made while building a system, keyed by component label or `c|d`."""

    objects: dict[str, str] = field(default_factory=dict)
    maps: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"objects": dict(sorted(self.objects.items())), "maps": dict(sorted(self.maps.items()))}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> ChoiceLog:
        return cls(objects=dict(data.get("objects", {})), maps=dict(data.get("maps", {})))

    def keys(self) -> set[str]:
        return set(self.objects) | set(self.maps)


@dataclass(frozen=True)
class InclusionSystem:
    points: tuple[str, ...]
    chosen_object: Mapping[str, str]
    maps: Mapping[tuple[str, str], Arrow]

    @classmethod
    def empty(cls) -> InclusionSystem:
        return cls((), {}, {})

    @cached_property
    def labels(self) -> tuple[str, ...]:
        return tuple(sorted(self.chosen_object, key=lambda label: (len(label_subset(label)), label)))

    def map_for(self, small: str, big: str) -> Arrow:
        if (small, big) not in self.maps:
            raise UnknownIdentifierError(map_key(small, big), "inclusion")
        return self.maps[(small, big)]

    def triples(self) -> list[tuple[str, str, str]]:
        subsets = {label: label_subset(label) for label in self.labels}
        return [
            (c, d, e)
            for c in self.labels
            for d in self.labels
            for e in self.labels
            if subsets[c] < subsets[d] < subsets[e]
        ]

    def validate(self, groupoid: SimplicialGroupoid | None = None) -> ValidationReport:
        report = ValidationReport()
        subsets = {label: label_subset(label) for label in self.labels}
        for c in self.labels:
            for d in self.labels:
                if subsets[c] < subsets[d] and (c, d) not in self.maps:
                    report.add("missing-map", f"no inclusion chosen for {map_key(c, d)}", map_key(c, d))
        for (c, d), arrow in sorted(self.maps.items()):
            if arrow.source != self.chosen_object.get(c) or arrow.target != self.chosen_object.get(d):
                report.add("endpoint", f"map for {map_key(c, d)} does not join the chosen objects", map_key(c, d))
            elif groupoid is not None and not groupoid.contains_arrow(arrow):
                report.add("not-an-inclusion", f"{arrow.morphism_id} is not in the inclusion sets", map_key(c, d))
        if groupoid is not None:
            for label, name in sorted(self.chosen_object.items()):
                if name not in groupoid.object_degree or groupoid.object_label(name) != label:
                    report.add("chosen-object", f"'{name}' is not an object over {{{label}}}", label)
        for c, d, e in self.triples():
            if (c, d) in self.maps and (d, e) in self.maps and (c, e) in self.maps:
                if self.maps[(d, e)].after(self.maps[(c, d)]) != self.maps[(c, e)]:
                    report.add("commutativity", f"triple {c} ⊂ {d} ⊂ {e} does not commute", f"{c}|{d}|{e}")
        return report

    def restrict(self, points: Iterable[str]) -> InclusionSystem:
        keep = frozenset(points)
        labels = {label for label in self.chosen_object if label_subset(label) <= keep}
        return InclusionSystem(
            tuple(sorted(keep & set(self.points))),
            {label: self.chosen_object[label] for label in labels},
            {key: arrow for key, arrow in self.maps.items() if key[0] in labels and key[1] in labels},
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "points": list(self.points),
            "chosen_object": dict(sorted(self.chosen_object.items())),
            "maps": {map_key(c, d): arrow.morphism_id for (c, d), arrow in sorted(self.maps.items())},
        }


def _new_variables(groupoid: SimplicialGroupoid, old_points: Iterable[str], point: str) -> tuple[list[str], list[tuple[str, str]]]:
    points = sorted(set(old_points) | {point})
    labels = [subset_label(s) for s in nonempty_subsets(points, groupoid.max_degree)]
    new_labels = [label for label in labels if point in label_subset(label)]
    variables = [
        (c, d)
        for d in new_labels
        for c in labels
        if label_subset(c) < label_subset(d)
    ]
    variables.sort(key=lambda key: (-len(label_subset(key[1])), -len(label_subset(key[0])), key[1], key[0]))
    return new_labels, variables


def _consistent(assigned: Mapping[tuple[str, str], Arrow], key: tuple[str, str], candidate: Arrow) -> bool:
    small, big = key
    small_set, big_set = label_subset(small), label_subset(big)
    for (c, d), arrow in assigned.items():
        c_set, d_set = label_subset(c), label_subset(d)
        if c == small and big_set < d_set and (big, d) in assigned:
            if assigned[(big, d)].after(candidate) != arrow:
                return False
        if d == big and c_set < small_set and (c, small) in assigned:
            if candidate.after(assigned[(c, small)]) != arrow:
                return False
        if c == small and d_set < big_set and (d, big) in assigned:
            if assigned[(d, big)].after(arrow) != candidate:
                return False
    return True


def _choose_objects(
    groupoid: SimplicialGroupoid,
    system: InclusionSystem,
    new_labels: list[str],
    seed: InclusionSystem,
    replay: ChoiceLog,
    log: ChoiceLog | None,
) -> dict[str, str]:
    chosen = dict(system.chosen_object)
    for label in new_labels:
        available = groupoid.objects_over(label_subset(label))
        if not available:
            raise PreconditionError(f"No object over {{{label}}}")
        wanted = seed.chosen_object.get(label) or replay.objects.get(label)
        if wanted is not None:
            if wanted not in available:
                raise InconsistentSeedError(f"'{wanted}' is not an object over {{{label}}}")
            chosen[label] = wanted
            continue
        chosen[label] = available[0]
        if len(available) > 1:
            logger.info("Free choice of object over {%s}: %s among %d", label, available[0], len(available))
            if log is not None:
                log.objects[label] = available[0]
    return chosen


def _wanted_maps(
    groupoid: SimplicialGroupoid,
    chosen: Mapping[str, str],
    new_labels: list[str],
    seed: InclusionSystem,
    replay: ChoiceLog,
) -> dict[tuple[str, str], str]:
    """Morphism ids pinned by the replay log or the seed for maps into the new labels; the seed wins."""
    wanted = {}
    for key_text, morphism_id in replay.maps.items():
        small, big = parse_map_key(key_text)
        if big in new_labels:
            wanted[(small, big)] = morphism_id
    for key, arrow in seed.maps.items():
        if key[1] not in new_labels:
            continue
        if arrow.source != chosen[key[0]] or arrow.target != chosen[key[1]] or not groupoid.contains_arrow(arrow):
            raise InconsistentSeedError(f"Seed map for {map_key(*key)} is not an inclusion between the chosen objects")
        wanted[key] = arrow.morphism_id
    return wanted


def _extend_through_top(
    groupoid: SimplicialGroupoid,
    system: InclusionSystem,
    chosen: Mapping[str, str],
    new_labels: list[str],
    top: str,
    wanted: Mapping[tuple[str, str], str],
    log: ChoiceLog | None,
) -> dict[tuple[str, str], Arrow] | None:
    """
    The free maps are the old top object into the new top and each new
    subset into the new top. Old subsets reach the new top through the old
    top; every map into a smaller new subset is the unique filler of its
    square over the new top.
    """
    old_top = subset_label(system.points)
    old_labels = [label for label in system.labels if label != old_top]
    lower_new = sorted((label for label in new_labels if label != top), key=lambda label: (-len(label_subset(label)), label))
    free = [old_top, *lower_new]
    candidates = {}
    for label in free:
        arrows = groupoid.arrows(chosen[label], chosen[top])
        if not arrows:
            raise PreconditionError(f"No inclusion {chosen[label]} -> {chosen[top]}")
        if (label, top) in wanted:
            arrows = tuple(arrow for arrow in arrows if arrow.morphism_id == wanted[(label, top)])
        candidates[label] = arrows

    def derive(into_top: Mapping[str, Arrow]) -> dict[tuple[str, str], Arrow] | None:
        """Every map computable from the top maps fixed so far, or None when one contradicts `wanted`."""
        into_top = dict(into_top)
        if old_top in into_top:
            for label in old_labels:
                into_top[label] = into_top[old_top].after(system.maps[(label, old_top)])
        derived = {(label, top): arrow for label, arrow in into_top.items()}
        for big in lower_new:
            if big not in into_top:
                continue
            for small in into_top:
                if label_subset(small) < label_subset(big):
                    derived[(small, big)] = fill_square(groupoid, into_top[small], into_top[big])
        for key, arrow in derived.items():
            if key in wanted and arrow.morphism_id != wanted[key]:
                return None
        return derived

    assigned: dict[str, Arrow] = {}

    def search(index: int) -> dict[tuple[str, str], Arrow] | None:
        if index == len(free):
            return derive(assigned)
        label = free[index]
        for candidate in candidates[label]:
            assigned[label] = candidate
            if derive(assigned) is not None:
                found = search(index + 1)
                if found is not None:
                    return found
            del assigned[label]
        return None

    maps = search(0)
    if maps is None:
        return None
    for label in free:
        key = (label, top)
        if key not in wanted and len(candidates[label]) > 1:
            logger.info("Free choice for %s: %s among %d", map_key(*key), assigned[label].morphism_id, len(candidates[label]))
            if log is not None:
                log.maps[map_key(*key)] = assigned[label].morphism_id
    return maps


def _search_extension(
    groupoid: SimplicialGroupoid,
    system: InclusionSystem,
    chosen: Mapping[str, str],
    variables: list[tuple[str, str]],
    wanted: Mapping[tuple[str, str], str],
    log: ChoiceLog | None,
) -> dict[tuple[str, str], Arrow] | None:
    """Constrained search for truncated groupoids, where the new points have no common top object."""
    assigned = dict(system.maps)

    def search(index: int) -> bool:
        if index == len(variables):
            return True
        key = variables[index]
        candidates = [
            arrow for arrow in groupoid.arrows(chosen[key[0]], chosen[key[1]]) if _consistent(assigned, key, arrow)
        ]
        if key in wanted:
            candidates = [arrow for arrow in candidates if arrow.morphism_id == wanted[key]]
        for candidate in candidates:
            assigned[key] = candidate
            if search(index + 1):
                if len(candidates) > 1 and key not in wanted:
                    logger.info("Free choice for %s: %s among %d", map_key(*key), candidate.morphism_id, len(candidates))
                    if log is not None:
                        log.maps[map_key(*key)] = candidate.morphism_id
                return True
            del assigned[key]
        return False

    return {key: arrow for key, arrow in assigned.items() if key not in system.maps} if search(0) else None


def extend_inclusion_system(
    groupoid: SimplicialGroupoid,
    system: InclusionSystem,
    point: str,
    seed: InclusionSystem | None = None,
    replay: ChoiceLog | None = None,
    log: ChoiceLog | None = None,
) -> InclusionSystem:
    """The system on `system.points ∪ {point}` that restricts to `system`."""
    if point not in groupoid.base_set:
        raise UnknownIdentifierError(point, "base point")
    if point in system.points:
        raise PreconditionError(f"Point '{point}' is already covered by the system")
    points = tuple(sorted(set(system.points) | {point}))
    new_labels, variables = _new_variables(groupoid, system.points, point)
    seed = seed or InclusionSystem.empty()
    replay = replay or ChoiceLog()

    chosen = _choose_objects(groupoid, system, new_labels, seed, replay, log)
    wanted = _wanted_maps(groupoid, chosen, new_labels, seed, replay)
    top = subset_label(points)
    if not system.points:
        maps = {}
    elif top in new_labels:
        maps = _extend_through_top(groupoid, system, chosen, new_labels, top, wanted, log)
    else:
        maps = _search_extension(groupoid, system, chosen, variables, wanted, log)
    if maps is None:
        raise InconsistentSeedError(f"No commuting extension by '{point}' matches the seed")
    return InclusionSystem(points, chosen, {**system.maps, **maps})


def build_inclusion_system(
    groupoid: SimplicialGroupoid,
    seed: InclusionSystem | None = None,
    replay: ChoiceLog | None = None,
    log: ChoiceLog | None = None,
) -> InclusionSystem:
    """A full commuting system extending `seed`, adding base points in sorted order."""
    seed = seed or InclusionSystem.empty()
    known = {subset_label(s) for s in nonempty_subsets(groupoid.base_set, groupoid.max_degree)}
    for label in list(seed.chosen_object) + [part for key in seed.maps for part in key]:
        if label not in known:
            raise UnknownIdentifierError(label, "component")
    system = InclusionSystem.empty()
    for point in groupoid.base_set:
        system = extend_inclusion_system(groupoid, system, point, seed, replay, log)
    return system


def diff_systems(first: InclusionSystem, second: InclusionSystem) -> dict[str, list[str]]:
    objects = sorted(
        label
        for label in set(first.chosen_object) | set(second.chosen_object)
        if first.chosen_object.get(label) != second.chosen_object.get(label)
    )
    maps = sorted(
        map_key(*key) for key in set(first.maps) | set(second.maps) if first.maps.get(key) != second.maps.get(key)
    )
    return {"objects": objects, "maps": maps}


def find_simplicial_automorphism(
    groupoid: SimplicialGroupoid, first: InclusionSystem, second: InclusionSystem
) -> dict[str, Arrow] | None:
    """
    Maps g_c̄ ∈ Hom(first.chosen[c̄], second.chosen[c̄]), one per component,
    with g_d̄ ∘ ι¹_{c̄,d̄} = ι²_{c̄,d̄} ∘ g_c̄ for every containment: the
    automorphism of the groupoid transporting one system onto the other.
    """
    labels = sorted(first.chosen_object, key=lambda label: (len(label_subset(label)), label))
    if set(labels) != set(second.chosen_object):
        raise PreconditionError("Systems cover different components")
    assignment: dict[str, Arrow] = {}

    def compatible(label: str, candidate: Arrow) -> bool:
        subset = label_subset(label)
        for other, arrow in assignment.items():
            if label_subset(other) < subset:
                if candidate.after(first.maps[(other, label)]) != second.maps[(other, label)].after(arrow):
                    return False
        return True

    def search(index: int) -> bool:
        if index == len(labels):
            return True
        label = labels[index]
        for candidate in groupoid.arrows(first.chosen_object[label], second.chosen_object[label]):
            if compatible(label, candidate):
                assignment[label] = candidate
                if search(index + 1):
                    return True
                del assignment[label]
        return False

    return dict(assignment) if search(0) else None
