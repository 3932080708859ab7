"""Morphisms of simplicial groupoids: one morphism set per degree, commuting with the inclusions."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping

from modules.ElementMap import Arrow, ElementMap
from modules.Errors import PreconditionError
from modules.GroupoidMorphismSet import (
    GroupoidMorphismSet,
    check_condition_A,
    check_condition_Bprime,
    check_relation_compatibility,
    compose_morphism_sets,
    identity_morphism_set,
)
from modules.SimplicialGroupoid import SimplicialGroupoid, relabeled_copy
from modules.ValidationReport import ValidationReport


@dataclass(frozen=True)
class SimplicialMorphism:
    source: SimplicialGroupoid
    target: SimplicialGroupoid
    degree_morphisms: Mapping[int, GroupoidMorphismSet]

    @classmethod
    def identity(cls, groupoid: SimplicialGroupoid) -> SimplicialMorphism:
        return cls(groupoid, groupoid, {n: identity_morphism_set(g) for n, g in groupoid.degree_groupoids.items()})

    def maps(self, n: int) -> frozenset[Arrow]:
        return self.degree_morphisms[n].maps

    def validate(self) -> ValidationReport:
        report = ValidationReport()
        if self.source.degrees != self.target.degrees:
            report.add("degrees", f"degrees differ: {self.source.degrees} vs {self.target.degrees}")
            return report
        for n in self.source.degrees:
            morphism_set = self.degree_morphisms.get(n)
            if morphism_set is None:
                report.add("missing-degree", f"no morphism set in degree {n}", str(n))
                continue
            well_formed = morphism_set.validate()
            report.extend(well_formed, prefix=f"degree {n}: ")
            if not well_formed.is_valid:
                continue
            relation = {
                (c, c) for c in morphism_set.source.component_label if c in morphism_set.target.component_label
            }
            compatible = check_relation_compatibility(morphism_set, relation)
            if not compatible:
                report.add("relation", f"degree {n} is not compatible with equality: {compatible.counterexample}", str(n))
            condition_a = check_condition_A(morphism_set)
            if not condition_a:
                report.add("condition-A", f"degree {n} fails (A): {condition_a.counterexample}", str(n))
            condition_b = check_condition_Bprime(morphism_set)
            if not condition_b:
                report.add("condition-Bprime", f"degree {n} fails (B'): {condition_b.counterexample}", str(n))
        if not report.is_valid:
            return report
        for n, m in combinations(self.source.degrees, 2):
            lower = compose_morphism_sets(self.target.inclusions[(n, m)], self.degree_morphisms[n])
            upper = compose_morphism_sets(self.degree_morphisms[m], self.source.inclusions[(n, m)])
            if lower.maps != upper.maps:
                report.add("square", f"square between degrees {n} and {m} does not commute", f"{n},{m}")
        return report

    def is_bijective(self) -> bool:
        return all(morphism_set.is_bijective() for morphism_set in self.degree_morphisms.values())

    def is_isomorphism(self) -> bool:
        return self.is_bijective() and self.validate().is_valid

    def inverse(self) -> SimplicialMorphism:
        if not self.is_bijective():
            raise PreconditionError("Only degree-wise bijective morphisms can be inverted")
        return SimplicialMorphism(
            self.target,
            self.source,
            {
                n: GroupoidMorphismSet(h.target, h.source, frozenset(a.inverse() for a in h.maps))
                for n, h in self.degree_morphisms.items()
            },
        )

    def to_dict(self) -> dict:
        return {
            str(n): sorted(a.morphism_id for a in h.maps) for n, h in sorted(self.degree_morphisms.items())
        }


def compose_simplicial(second: SimplicialMorphism, first: SimplicialMorphism) -> SimplicialMorphism:
    return SimplicialMorphism(
        first.source,
        second.target,
        {n: compose_morphism_sets(second.degree_morphisms[n], first.degree_morphisms[n]) for n in first.degree_morphisms},
    )


def relabeling_isomorphism(
    groupoid: SimplicialGroupoid,
    copy: SimplicialGroupoid,
    object_renaming: Mapping[str, str],
    element_renaming: Mapping[str, str],
) -> SimplicialMorphism:
    """H_n = {r_{O'} ∘ g : g ∈ Hom(O, O')} for the renaming r between a groupoid and its relabeled copy."""
    degree_morphisms = {}
    for n, level in groupoid.degree_groupoids.items():
        renamings = {
            name: Arrow(
                name,
                object_renaming[name],
                ElementMap.from_dict({x: element_renaming[x] for x in level.objects[name]}),
            )
            for name in level.object_ids
        }
        maps = {
            renamings[target].after(g)
            for source in level.object_ids
            for target in level.object_ids
            for g in level.hom(source, target)
        }
        degree_morphisms[n] = GroupoidMorphismSet(level, copy.degree_groupoids[n], frozenset(maps))
    return SimplicialMorphism(groupoid, copy, degree_morphisms)


def relabeling_corpus(
    groupoid: SimplicialGroupoid, tags: tuple[str, ...] = ("'", "''")
) -> tuple[list[SimplicialGroupoid], dict[tuple[int, int], SimplicialMorphism]]:
    """The groupoid and tagged copies of it, with the relabeling isomorphism between every ordered pair of distinct members."""
    members = [groupoid]
    from_first = [SimplicialMorphism.identity(groupoid)]
    for tag in tags:
        copy, objects, elements = relabeled_copy(groupoid, tag)
        members.append(copy)
        from_first.append(relabeling_isomorphism(groupoid, copy, objects, elements))
    isomorphisms = {}
    for i in range(len(members)):
        for j in range(len(members)):
            if i != j:
                isomorphisms[(i, j)] = compose_simplicial(from_first[j], from_first[i].inverse())
    return members, isomorphisms
