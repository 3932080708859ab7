"""
Morphisms between covers of one universe 𝕌.

A morphism from (𝕌, S₁) to (𝕌, S₂) is a fiber-preserving map h: S₁ -> S₂.
Its combined structure puts both covers over the shared 𝕌 (non-base sorts
and relations prefixed `1:` and `2:`) and names the graph of h. Two
morphisms are identified when the combined structures are isomorphic over 𝕌
carrying one graph to the other; at map level this means h₂ = τ₂ h₁ τ₁⁻¹ for
automorphisms τᵢ of the covers over 𝕌.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

from modules.ElementMap import ElementMap
from modules.Errors import PreconditionError
from modules.IsomorphismSearch import IsomorphismSearch, automorphism_group
from modules.MultiSortedStructure import MultiSortedStructure, Relation, disjoint_cover_copy
from modules.StructureAnalyzer import StructureAnalyzer
from modules.ValidationReport import ValidationReport

logger = logging.getLogger(__name__)

GRAPH_RELATION = "h_graph"


def fiber_automorphisms(cover: MultiSortedStructure) -> list[ElementMap]:
    """Aut(cover / 𝕌) restricted to the fiber sort, deduplicated and sorted."""
    elements = cover.sorts[cover.fiber_map.fiber_sort]
    group = automorphism_group(cover, fixed_elements=cover.base_elements)
    return sorted({g.restrict(elements) for g in group}, key=lambda g: g.signature)


def _require_cover(structure: MultiSortedStructure) -> None:
    if structure.fiber_map is None:
        raise PreconditionError("A cover needs a fiber map")


@dataclass(frozen=True)
class CoverMorphism:
    first: MultiSortedStructure
    second: MultiSortedStructure
    mapping: ElementMap

    def __post_init__(self):
        _require_cover(self.first)
        _require_cover(self.second)

    @classmethod
    def identity(cls, cover: MultiSortedStructure, tag: str = "'") -> CoverMorphism:
        """The copy map from a cover onto a disjoint copy of itself with the same sort names."""
        copy, renaming = disjoint_cover_copy(cover, tag, rename_sorts=False)
        fiber = cover.sorts[cover.fiber_map.fiber_sort]
        return cls(cover, copy, ElementMap.from_dict({x: renaming[x] for x in fiber}))

    @property
    def source_fiber(self) -> tuple[str, ...]:
        return self.first.sorts[self.first.fiber_map.fiber_sort]

    @property
    def target_fiber(self) -> tuple[str, ...]:
        return self.second.sorts[self.second.fiber_map.fiber_sort]

    def is_isomorphism(self) -> bool:
        return (
            self.mapping.domain == frozenset(self.source_fiber)
            and self.mapping.image == frozenset(self.target_fiber)
            and self.mapping.is_injective()
        )

    def compose(self, other: CoverMorphism) -> CoverMorphism:
        """`other` after `self`."""
        if self.second != other.first:
            raise PreconditionError("Cover morphisms are not composable: middle covers differ")
        return CoverMorphism(self.first, other.second, other.mapping.after(self.mapping))

    def inverse(self) -> CoverMorphism:
        if not self.is_isomorphism():
            raise PreconditionError("Only isomorphisms of covers can be inverted")
        return CoverMorphism(self.second, self.first, self.mapping.inverse())

    @cached_property
    def combined(self) -> MultiSortedStructure:
        first, second = self.first, self.second
        if first.base_elements != second.base_elements or first.base_sorts != second.base_sorts:
            raise PreconditionError("Covers live over different universes")
        overlap = (set(first.elements) - first.base_elements) & (set(second.elements) - second.base_elements)
        if overlap:
            raise PreconditionError(f"Covers share the non-base element '{sorted(overlap)[0]}'")

        sorts = {s: first.sorts[s] for s in first.sorts if s in first.base_sorts}
        relations: dict[str, Relation] = {}
        for name, relation in first.relations.items():
            if all(s in first.base_sorts for s in relation.signature):
                if second.relations.get(name) != relation:
                    raise PreconditionError(f"Covers disagree on the base relation '{name}'")
                relations[name] = relation
        supports = {}
        fiber_sorts = []
        for prefix, cover in (("1:", first), ("2:", second)):
            rename = {s: s if s in cover.base_sorts else f"{prefix}{s}" for s in cover.sorts}
            for sort, elements in cover.sorts.items():
                if sort not in cover.base_sorts:
                    sorts[rename[sort]] = elements
            for name, relation in cover.all_relations.items():
                if all(s in cover.base_sorts for s in relation.signature):
                    continue
                relations[f"{prefix}{name}"] = Relation(tuple(rename[s] for s in relation.signature), relation.tuples)
            supports.update(cover.supports)
            fiber_sorts.append(rename[cover.fiber_map.fiber_sort])
        relations[GRAPH_RELATION] = Relation(tuple(fiber_sorts), frozenset(self.mapping.pairs))
        return MultiSortedStructure(sorts, relations, first.base_sorts, None, supports)

    def validate(self, analyzer: StructureAnalyzer | None = None) -> ValidationReport:
        """h total and fiber-preserving, and the combined structure stably embeds both covers over 𝕌."""
        report = ValidationReport()
        source_points = self.first.fiber_map.assignment
        target_points = self.second.fiber_map.assignment
        if self.mapping.domain != frozenset(self.source_fiber):
            report.add("not-total", "h is not defined on the whole fiber sort")
        for x, y in self.mapping.pairs:
            if y not in target_points.domain:
                report.add("target", f"h sends '{x}' outside the target fiber sort", x)
            elif source_points.get(x) != target_points(y):
                report.add("fiber", f"h moves '{x}' to another fiber", x)
        if not report.is_valid:
            return report
        analyzer = analyzer or StructureAnalyzer()
        combined = self.combined
        for side, prefix in (("first", "1:"), ("second", "2:")):
            part = _prefixed_part(combined, prefix)
            embedded = analyzer.check_stable_embedding(combined, part, fix_base=True)
            if not embedded:
                report.add("stable-embedding", f"{side} cover does not embed stably: {embedded.counterexample}", side)
        return report

    def transports_automorphisms(self) -> bool:
        """For an isomorphism: conjugation by h carries Aut(S₁/𝕌) onto Aut(S₂/𝕌)."""
        if not self.is_isomorphism():
            return False
        h, h_inverse = self.mapping, self.mapping.inverse()
        conjugated = {h.after(g).after(h_inverse) for g in fiber_automorphisms(self.first)}
        return conjugated == set(fiber_automorphisms(self.second))


def _prefixed_part(combined: MultiSortedStructure, prefix: str) -> MultiSortedStructure:
    """The copy of one cover inside a combined structure."""
    sorts = {s: xs for s, xs in combined.sorts.items() if s in combined.base_sorts or s.startswith(prefix)}
    relations = {
        name: r
        for name, r in combined.relations.items()
        if name.startswith(prefix) or (name != GRAPH_RELATION and all(s in combined.base_sorts for s in r.signature))
    }
    return MultiSortedStructure(sorts, relations, combined.base_sorts)


@dataclass(frozen=True)
class MorphismEquivalence:
    first: CoverMorphism
    second: CoverMorphism
    witness: ElementMap
    level: str

    def to_dict(self) -> dict:
        return {"level": self.level, "witness": dict(self.witness.pairs)}


def maps_equivalent(first: CoverMorphism, second: CoverMorphism) -> MorphismEquivalence | None:
    """Automorphisms τ₁, τ₂ over 𝕌 with second.h = τ₂ ∘ first.h ∘ τ₁⁻¹, if any. Needs first.h bijective."""
    if first.first != second.first or first.second != second.second:
        raise PreconditionError("Morphisms must share their source and target covers")
    if not first.is_isomorphism():
        raise PreconditionError("Map-level comparison needs an isomorphism")
    targets = set(fiber_automorphisms(first.second))
    h1_inverse = first.mapping.inverse()
    for tau1 in fiber_automorphisms(first.first):
        tau2 = second.mapping.after(tau1).after(h1_inverse)
        if tau2 in targets:
            logger.debug("Maps related by τ₁ = %s", tau1.signature)
            return MorphismEquivalence(first, second, tau1.union(tau2), "maps")
    return None


def find_morphism_equivalence(first: CoverMorphism, second: CoverMorphism) -> MorphismEquivalence | None:
    """An isomorphism of the combined structures fixing 𝕌 pointwise; it carries h-graph to h-graph."""
    source, target = first.combined, second.combined
    if source.base_elements != target.base_elements:
        return None
    witness = IsomorphismSearch(source, target, fixed_elements=source.base_elements, limit=1).first()
    if witness is None:
        return None
    return MorphismEquivalence(first, second, witness, "structure")

