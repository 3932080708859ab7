"""
Extraction of the binding simplicial groupoid of a finite cover.

For every subset c̄ of A (up to the degree cap) the binding group Γ_c̄ is the
group of automorphisms of the restriction (𝕌, S_c̄) fixing 𝕌 pointwise, read
as permutations of S_c̄. The groupoid in 𝕌 carries one formal copy O[c̄] per
component; the extension adds S_c̄ itself as a second object.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

from modules.ElementMap import Arrow, ElementMap
from modules.Errors import InvariantBreachError, LocalStableEmbeddednessError, PreconditionError
from modules.IsomorphismSearch import automorphism_group
from modules.MultiSortedStructure import MultiSortedStructure
from modules.SimplicialGroupoid import (
    ObjectSpec,
    SimplicialGroupoid,
    label_subset,
    nonempty_subsets,
    simplicial_from_reference,
    subset_label,
)
from modules.StructureAnalyzer import StructureAnalyzer

logger = logging.getLogger(__name__)


def copy_object(label: str) -> str:
    return f"O[{label}]"


def fiber_object(label: str) -> str:
    return f"S[{label}]"


@dataclass(frozen=True)
class BindingExtraction:
    cover: MultiSortedStructure
    fiber_sets: Mapping[str, tuple[str, ...]]
    fiber_groups: Mapping[str, tuple[ElementMap, ...]]
    groupoid_in_U: SimplicialGroupoid
    extension: SimplicialGroupoid

    @property
    def points(self) -> tuple[str, ...]:
        return self.groupoid_in_U.base_set

    @property
    def labels(self) -> list[str]:
        return list(self.fiber_sets)

    @cached_property
    def copy_maps(self) -> dict[str, ElementMap]:
        """φ_c̄: S_c̄ -> O[c̄], the i-th element of sorted S_c̄ to `o[c̄]#i`."""
        return {
            label: ElementMap.from_dict({s: f"o[{label}]#{i}" for i, s in enumerate(elements)})
            for label, elements in self.fiber_sets.items()
        }

    def fiber_tokens(self, label: str) -> ElementMap:
        """S_c̄ -> elements of the extension object S[c̄]."""
        return ElementMap.from_dict({s: f"{label}|{s}" for s in self.fiber_sets[label]})

    def embedding_family(self, label: str) -> tuple[Arrow, ...]:
        """Hom(O[c̄], S[c̄]) in the extension, as bijections onto the actual fiber elements."""
        untag = self.fiber_tokens(label).inverse()
        return tuple(
            Arrow(copy_object(label), fiber_object(label), untag.after(arrow.mapping))
            for arrow in self.extension.arrows(copy_object(label), fiber_object(label))
        )

    def summary(self) -> dict[str, int]:
        return {label: len(group) for label, group in self.fiber_groups.items()}


def binding_group(
    cover: MultiSortedStructure, label: str, analyzer: StructureAnalyzer | None = None
) -> tuple[ElementMap, ...]:
    """Γ_c̄ as permutations of S_c̄, sorted by signature."""
    analyzer = analyzer or StructureAnalyzer()
    fiber = cover.fiber_map
    restricted = analyzer.restrict_structure(
        cover, fiber_subset=label_subset(label), fix_base=True, orbit_sorts=[fiber.fiber_sort]
    )
    elements = cover.fiber_over(label_subset(label))
    group = automorphism_group(restricted, fixed_elements=restricted.base_elements)
    return tuple(sorted({g.restrict(elements) for g in group}, key=lambda g: g.signature))


def extract_binding_simplicial_groupoid(
    cover: MultiSortedStructure, analyzer: StructureAnalyzer | None = None, max_degree: int = 0
) -> BindingExtraction:
    fiber = cover.fiber_map
    if fiber is None:
        raise PreconditionError("Extraction needs a cover with a fiber map")
    analyzer = analyzer or StructureAnalyzer()
    points = tuple(sorted(fiber.base_set))
    top = min(max_degree or len(points), len(points))

    fiber_sets: dict[str, tuple[str, ...]] = {}
    groups: dict[str, tuple[ElementMap, ...]] = {}
    for subset in nonempty_subsets(points, top):
        label = subset_label(subset)
        fiber_sets[label] = cover.fiber_over(subset)
        groups[label] = binding_group(cover, label, analyzer)
        logger.debug("Binding group over %s has order %d", label, len(groups[label]))

    for subset in nonempty_subsets(points, top - 1):
        small = subset_label(subset)
        for extra in points:
            if extra in subset:
                continue
            big = subset_label(subset + (extra,))
            restricted = {g.restrict(fiber_sets[small]) for g in groups[big]}
            missing = sorted(set(groups[small]) - restricted, key=lambda g: g.signature)
            if missing:
                raise LocalStableEmbeddednessError(
                    f"Automorphism over {small} does not lift to {big}", witness=missing[0].signature
                )
            if not restricted <= set(groups[small]):
                raise InvariantBreachError(f"Restriction from {big} to {small} leaves the binding group")

    copy_specs, fiber_specs = [], []
    for label, elements in fiber_sets.items():
        copy_specs.append(
            ObjectSpec(copy_object(label), label, ElementMap.from_dict({s: f"o[{label}]#{i}" for i, s in enumerate(elements)}))
        )
        fiber_specs.append(ObjectSpec(fiber_object(label), label, ElementMap.from_dict({s: f"{label}|{s}" for s in elements})))
    groupoid_in_U = simplicial_from_reference(points, fiber_sets, groups, copy_specs)
    extension = simplicial_from_reference(points, fiber_sets, groups, copy_specs + fiber_specs)
    report = extension.validate()
    if not report.is_valid:
        raise InvariantBreachError(f"Extracted groupoid is not a simplicial groupoid: {report.violations[0].message}")
    logger.info("Extracted binding groupoid over %d points, degrees 1..%d", len(points), top)
    return BindingExtraction(cover, fiber_sets, groups, groupoid_in_U, extension)


def projective_limit_aut(extraction: BindingExtraction, max_degree: int) -> list[ElementMap]:
    """
    Families (σ_c̄) over |c̄| ≤ k compatible under restriction, as permutations
    of S. A family is fixed by its singletons, so the search runs over those
    and prunes at every subset whose points are all assigned.
    """
    if max_degree < 1:
        raise PreconditionError("The projective limit needs max_degree >= 1")
    points = extraction.points
    top = min(max_degree, max(len(label_subset(label)) for label in extraction.fiber_sets))
    groups = {label: set(group) for label, group in extraction.fiber_groups.items()}
    checks: dict[str, list[str]] = {a: [] for a in points}
    for subset in nonempty_subsets(points, top):
        if len(subset) > 1:
            checks[max(subset)].append(subset_label(subset))

    chosen: dict[str, ElementMap] = {}
    results: list[ElementMap] = []

    def search(index: int) -> None:
        if index == len(points):
            merged = ElementMap(())
            for a in points:
                merged = merged.union(chosen[a])
            results.append(merged)
            return
        point = points[index]
        for sigma in extraction.fiber_groups[point]:
            chosen[point] = sigma
            if all(_union(chosen, label) in groups[label] for label in checks[point]):
                search(index + 1)
            del chosen[point]

    search(0)
    return sorted(results, key=lambda g: g.signature)


def _union(chosen: Mapping[str, ElementMap], label: str) -> ElementMap:
    merged = ElementMap(())
    for a in sorted(label_subset(label)):
        merged = merged.union(chosen[a])
    return merged


def global_fiber_group(cover: MultiSortedStructure) -> list[ElementMap]:
    """Aut(M/𝕌) restricted to the fiber sort, for comparison with the projective limit."""
    fiber_elements = cover.sorts[cover.fiber_map.fiber_sort]
    group = automorphism_group(cover, fixed_elements=cover.base_elements)
    return sorted({g.restrict(fiber_elements) for g in group}, key=lambda g: g.signature)
