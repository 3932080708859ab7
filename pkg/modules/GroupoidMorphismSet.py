"""
Morphisms of concrete groupoids given as sets of maps between objects, the
conditions (A) and (B'), relation compatibility, and gluing along an
isomorphism.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

from modules.ConcreteGroupoid import ConcreteGroupoid, close_arrows
from modules.ElementMap import Arrow, ElementMap, sorted_arrows
from modules.Errors import PreconditionError
from modules.ValidationReport import CheckResult, ValidationReport


@dataclass(frozen=True)
class GroupoidMorphismSet:
    """
    A set H of maps from objects of `source` to objects of `target`.

    `relation` optionally records the intended component relation
    R ⊆ components(source) × components(target).
    """

    source: ConcreteGroupoid
    target: ConcreteGroupoid
    maps: frozenset[Arrow]
    relation: frozenset[tuple[str, str]] | None = None

    @cached_property
    def sorted_maps(self) -> tuple[Arrow, ...]:
        return sorted_arrows(self.maps)

    @cached_property
    def _by_endpoints(self) -> dict[tuple[str, str], tuple[Arrow, ...]]:
        grouped: dict[tuple[str, str], list[Arrow]] = defaultdict(list)
        for arrow in self.maps:
            grouped[(arrow.source, arrow.target)].append(arrow)
        return {key: sorted_arrows(value) for key, value in grouped.items()}

    def maps_between(self, source_object: str, target_object: str) -> tuple[Arrow, ...]:
        return self._by_endpoints.get((source_object, target_object), ())

    def validate(self) -> ValidationReport:
        """Well-formedness: endpoints exist, domains and codomains match, H non-empty."""
        report = ValidationReport()
        if not self.maps:
            report.add("empty", "morphism set is empty")
        for arrow in self.sorted_maps:
            if arrow.source not in self.source.objects:
                report.add("unknown-object", f"map {arrow.morphism_id} starts at unknown object", arrow.morphism_id)
                continue
            if arrow.target not in self.target.objects:
                report.add("unknown-object", f"map {arrow.morphism_id} ends at unknown object", arrow.morphism_id)
                continue
            if arrow.mapping.domain != self.source.objects[arrow.source]:
                report.add("domain-mismatch", f"map {arrow.morphism_id} has the wrong domain", arrow.morphism_id)
            if not arrow.mapping.image <= self.target.objects[arrow.target]:
                report.add("codomain-mismatch", f"map {arrow.morphism_id} leaves its target object", arrow.morphism_id)
        return report

    def is_injective(self) -> bool:
        return all(arrow.mapping.is_injective() for arrow in self.maps)

    def is_bijective(self) -> bool:
        return all(
            arrow.mapping.is_injective() and arrow.mapping.image == self.target.objects[arrow.target]
            for arrow in self.maps
        )

    def component_pairs(self) -> frozenset[tuple[str, str]]:
        return frozenset(
            (self.source.component_of[a.source], self.target.component_of[a.target]) for a in self.maps
        )


def identity_morphism_set(groupoid: ConcreteGroupoid) -> GroupoidMorphismSet:
    relation = frozenset((c, c) for c in groupoid.component_label)
    return GroupoidMorphismSet(groupoid, groupoid, groupoid.morphisms, relation)


def compose_morphism_sets(second: GroupoidMorphismSet, first: GroupoidMorphismSet) -> GroupoidMorphismSet:
    """All composites second ∘ first where the endpoints meet."""
    by_source: dict[str, list[Arrow]] = defaultdict(list)
    for arrow in second.maps:
        by_source[arrow.source].append(arrow)
    composites = {outer.after(inner) for inner in first.maps for outer in by_source[inner.target]}
    return GroupoidMorphismSet(first.source, second.target, frozenset(composites))


def check_condition_A(morphism_set: GroupoidMorphismSet) -> CheckResult:
    """
    h_p ∘ Hom(O1k, O1i) = Hom(O2l, O2j) ∘ h_m for every pair h_p: O1i -> O2j,
    h_m: O1k -> O2l whose sources share a component and whose targets share a
    component.
    """
    source, target = morphism_set.source, morphism_set.target
    arrows = morphism_set.sorted_maps
    for h_p in arrows:
        for h_m in arrows:
            if source.component_of[h_p.source] != source.component_of[h_m.source]:
                continue
            if target.component_of[h_p.target] != target.component_of[h_m.target]:
                continue
            left = {h_p.after(g).mapping for g in source.hom(h_m.source, h_p.source)}
            right = {k.after(h_m).mapping for k in target.hom(h_m.target, h_p.target)}
            if left != right:
                only_left = sorted(left - right, key=lambda m: m.signature)
                only_right = sorted(right - left, key=lambda m: m.signature)
                side, witness = ("left-only", only_left[0]) if only_left else ("right-only", only_right[0])
                return CheckResult(
                    False,
                    {"h_p": h_p.morphism_id, "h_m": h_m.morphism_id, "side": side, "function": witness.signature},
                )
    return CheckResult(True)


def check_condition_Bprime(morphism_set: GroupoidMorphismSet) -> CheckResult:
    """
    Closure under precomposition by source morphisms and postcomposition by
    target morphisms. `details["B"]` reports the weaker postcomposition-only
    condition.
    """
    source, target = morphism_set.source, morphism_set.target
    present = morphism_set.maps
    post_failure = None
    pre_failure = None
    for h in morphism_set.sorted_maps:
        for name in target.object_ids:
            for k in target.hom(h.target, name):
                if k.after(h) not in present and post_failure is None:
                    post_failure = {"kind": "postcomposition", "map": h.morphism_id, "by": k.morphism_id}
        for name in source.object_ids:
            for g in source.hom(name, h.source):
                if h.after(g) not in present and pre_failure is None:
                    pre_failure = {"kind": "precomposition", "map": h.morphism_id, "by": g.morphism_id}
    holds_b = post_failure is None
    holds = holds_b and pre_failure is None
    return CheckResult(holds, post_failure or pre_failure, {"B": holds_b})


def check_relation_compatibility(
    morphism_set: GroupoidMorphismSet, relation: Iterable[tuple[str, str]]
) -> CheckResult:
    """A map runs from component a to component b exactly when (a, b) is in the relation."""
    wanted = set(relation)
    realised = morphism_set.component_pairs()
    for a in sorted(morphism_set.source.component_label):
        for b in sorted(morphism_set.target.component_label):
            if ((a, b) in realised) != ((a, b) in wanted):
                return CheckResult(False, {"components": [a, b], "realised": (a, b) in realised})
    stray = sorted(wanted - {(a, b) for a in morphism_set.source.component_label for b in morphism_set.target.component_label})
    if stray:
        return CheckResult(False, {"components": list(stray[0]), "realised": False})
    return CheckResult(True)


def disjoint_copy(groupoid: ConcreteGroupoid, tag: str) -> tuple[ConcreteGroupoid, GroupoidMorphismSet]:
    """A tagged copy of the groupoid and the morphism set G -> copy generated by the renaming."""
    object_names = {name: f"{tag}{name}" for name in groupoid.objects}
    element_names = {x: f"{tag}{x}" for xs in groupoid.objects.values() for x in xs}
    copy = groupoid.rename(object_names, element_names)
    renamings = [
        Arrow(name, object_names[name], ElementMap.from_dict({x: element_names[x] for x in groupoid.objects[name]}))
        for name in groupoid.object_ids
    ]
    maps = {r.after(g) for r in renamings for name in groupoid.object_ids for g in groupoid.hom(name, r.source)}
    relation = frozenset((c, c) for c in groupoid.component_label)
    return copy, GroupoidMorphismSet(groupoid, copy, frozenset(maps), relation)


def glue_isomorphism(morphism_set: GroupoidMorphismSet) -> ConcreteGroupoid:
    """
    One groupoid on the disjoint union of objects in which the maps of H become
    morphisms. Components related by H merge under the source component id.
    """
    if not morphism_set.is_bijective():
        raise PreconditionError("Every map must be a bijection onto its target object")
    condition_a = check_condition_A(morphism_set)
    if not condition_a:
        raise PreconditionError(f"Condition (A) fails: {condition_a.counterexample}")
    condition_b = check_condition_Bprime(morphism_set)
    if not condition_b:
        raise PreconditionError(f"Condition (B') fails: {condition_b.counterexample}")
    source, target = morphism_set.source, morphism_set.target
    clash = set(source.objects) & set(target.objects)
    if clash:
        raise PreconditionError(f"Object ids shared by both groupoids: {sorted(clash)}")
    shared_elements = set(source.element_owner) & set(target.element_owner)
    if shared_elements:
        raise PreconditionError(f"Elements shared by both groupoids: {sorted(shared_elements)[:3]}")

    merged_into = {}
    for a, b in sorted(morphism_set.component_pairs()):
        if b in merged_into and merged_into[b] != a:
            raise PreconditionError(f"Target component '{b}' is hit from two source components")
        merged_into[b] = a
    component_label = dict(source.component_label)
    for component, label in target.component_label.items():
        if component in merged_into:
            continue
        if component in component_label:
            raise PreconditionError(f"Component id '{component}' is used on both sides")
        component_label[component] = label
    component_of = dict(source.component_of)
    for name, component in target.component_of.items():
        component_of[name] = merged_into.get(component, component)
    objects = {**source.objects, **target.objects}
    generators = list(source.morphisms) + list(target.morphisms) + list(morphism_set.maps)
    return ConcreteGroupoid(
        objects=objects,
        component_of=component_of,
        component_label=component_label,
        morphisms=frozenset(close_arrows(generators)),
    )
