"""
Coherent families for a simplicial morphism H between groupoids equipped
with inclusion systems ι¹ and ι²: degree-1 maps m_a ∈ H_1 such that for every
c̄ the map h_c̄ determined by h_c̄ ∘ ι¹_{a,c̄} = ι²_{a,c̄} ∘ m_a lies in H_|c̄|.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Iterable, Mapping

from modules.ElementMap import Arrow, ElementMap
from modules.Errors import NotCoherentError, PreconditionError, UnknownIdentifierError
from modules.InclusionSystem import InclusionSystem
from modules.SimplicialGroupoid import label_subset, nonempty_subsets, subset_label
from modules.SimplicialMorphism import SimplicialMorphism
from modules.ValidationReport import ValidationReport

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoherentFamily:
    maps: Mapping[str, Arrow]
    witnesses: Mapping[str, Arrow]

    @property
    def points(self) -> tuple[str, ...]:
        return tuple(sorted(self.maps))

    def restrict(self, points: Iterable[str]) -> CoherentFamily:
        keep = frozenset(points)
        return CoherentFamily(
            {a: m for a, m in self.maps.items() if a in keep},
            {label: h for label, h in self.witnesses.items() if label_subset(label) <= keep},
        )

    def validate(self, morphism: SimplicialMorphism, first: InclusionSystem, second: InclusionSystem) -> ValidationReport:
        """Coherence squares ι² ∘ m_a = h_c̄ ∘ ι¹ on the chosen objects, and membership in H."""
        report = ValidationReport()
        for a, arrow in sorted(self.maps.items()):
            if arrow not in morphism.maps(1):
                report.add("not-in-H", f"m_{a} = {arrow.morphism_id} is not a degree-1 map of H", a)
        for label, witness in sorted(self.witnesses.items()):
            n = len(label_subset(label))
            if witness not in morphism.maps(n):
                report.add("not-in-H", f"witness over {{{label}}} is not a degree-{n} map of H", label)
                continue
            for a in sorted(label_subset(label)):
                if n == 1 or a not in self.maps:
                    continue
                left = first.map_for(a, label)
                right = second.map_for(a, label)
                if witness.after(left) != right.after(self.maps[a]):
                    report.add("square", f"square at {a} ⊂ {{{label}}} does not commute", f"{a}|{label}")
        return report

    def to_dict(self) -> dict[str, Any]:
        return {
            "maps": {a: m.morphism_id for a, m in sorted(self.maps.items())},
            "witnesses": {label: h.morphism_id for label, h in sorted(self.witnesses.items())},
        }


def coherence_witness(
    morphism: SimplicialMorphism,
    first: InclusionSystem,
    second: InclusionSystem,
    maps: Mapping[str, Arrow],
    label: str,
) -> Arrow:
    """
    The unique map h_c̄: ι¹(c̄) -> ι²(c̄) agreeing with every m_a along the
    inclusion legs. The legs partition the object, so h_c̄ is determined.
    """
    points = sorted(label_subset(label))
    missing = [a for a in points if a not in maps]
    if missing:
        raise UnknownIdentifierError(missing[0], "family point")
    if len(points) == 1:
        if maps[points[0]] not in morphism.maps(1):
            raise NotCoherentError(f"m_{points[0]} is not a degree-1 map of H", subset=label)
        return maps[points[0]]
    source_object = first.chosen_object[label]
    target_object = second.chosen_object[label]
    graph: dict[str, str] = {}
    for a in points:
        leg_in = first.map_for(a, label)
        leg_out = second.map_for(a, label)
        for x, y in maps[a].mapping.pairs:
            image = leg_in(x)
            value = leg_out(y)
            if image in graph and graph[image] != value:
                raise PreconditionError(f"Inclusion legs into '{source_object}' overlap at '{image}'")
            graph[image] = value
    n = len(points)
    source_elements = morphism.source.degree_groupoids[n].objects[source_object]
    if frozenset(graph) != source_elements:
        raise PreconditionError(f"Inclusion legs do not cover '{source_object}'")
    candidate = Arrow(source_object, target_object, ElementMap.from_dict(graph))
    if candidate not in morphism.maps(n):
        raise NotCoherentError(f"No map of H_{n} over {{{label}}} agrees with the family", subset=label)
    return candidate


def find_coherent_family(
    morphism: SimplicialMorphism,
    first: InclusionSystem,
    second: InclusionSystem,
    partial: CoherentFamily | None = None,
) -> CoherentFamily:
    """
    Extend `partial` one point at a time. Each new m_a is the least map of
    H_1 (by morphism id) for which every subset containing a and already
    covered points has a witness; a dead end backtracks to the previous point.
    """
    partial = partial or CoherentFamily({}, {})
    points = list(morphism.source.base_set)
    max_degree = morphism.source.max_degree
    fixed = dict(partial.maps)
    for a in fixed:
        if a not in points:
            raise UnknownIdentifierError(a, "base point")
    witnesses: dict[str, Arrow] = {}
    for subset in nonempty_subsets(sorted(fixed), max_degree):
        label = subset_label(subset)
        try:
            witnesses[label] = coherence_witness(morphism, first, second, fixed, label)
        except NotCoherentError as error:
            raise NotCoherentError(f"Partial family is not coherent over {{{label}}}", subset=label) from error

    order = sorted(fixed) + [a for a in points if a not in fixed]
    chosen = dict(fixed)

    def witnesses_for(a: str) -> dict[str, Arrow] | None:
        done = [b for b in order if b in chosen and b != a]
        found = {}
        for subset in nonempty_subsets(done + [a], max_degree):
            if a not in subset:
                continue
            label = subset_label(subset)
            try:
                found[label] = coherence_witness(morphism, first, second, chosen, label)
            except NotCoherentError:
                return None
        return found

    def search(index: int) -> bool:
        if index == len(order):
            return True
        a = order[index]
        if a in fixed:
            return search(index + 1)
        candidates = [
            arrow
            for arrow in morphism.degree_morphisms[1].sorted_maps
            if arrow.source == first.chosen_object[a] and arrow.target == second.chosen_object[a]
        ]
        for candidate in candidates:
            chosen[a] = candidate
            found = witnesses_for(a)
            if found is not None:
                witnesses.update(found)
                if search(index + 1):
                    return True
                for label in found:
                    witnesses.pop(label, None)
            del chosen[a]
        logger.debug("No coherent choice at '%s' among %d candidates", a, len(candidates))
        return False

    if not search(0):
        raise NotCoherentError("No coherent family extends the partial family")
    return CoherentFamily(dict(chosen), witnesses)
