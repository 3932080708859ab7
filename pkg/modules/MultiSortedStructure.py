"""
Finite multi-sorted relational structures.

A structure has named sorts (declared order is significant for search
determinism), named relations with sort signatures, a set of base sorts
playing the role of 𝕌, and optionally a fiber map from one sort S onto a set
A of base elements. Elements are globally unique strings.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Mapping

from modules.ElementMap import ElementMap
from modules.Errors import UnknownIdentifierError
from modules.ValidationReport import ValidationReport

FIBER_RELATION = "fiber_of"

# An automorphism is stored as one element map over the whole universe;
# `per_sort` splits it into the per-sort bijections.
Automorphism = ElementMap


@dataclass(frozen=True)
class Relation:
    signature: tuple[str, ...]
    tuples: frozenset[tuple[str, ...]]

    @classmethod
    def of(cls, signature: Iterable[str], tuples: Iterable[Iterable[str]]) -> Relation:
        return cls(tuple(signature), frozenset(tuple(t) for t in tuples))

    @property
    def arity(self) -> int:
        return len(self.signature)

    def restrict(self, universe: frozenset[str]) -> Relation:
        return Relation(self.signature, frozenset(t for t in self.tuples if all(x in universe for x in t)))

    def rename(self, renaming: Mapping[str, str]) -> Relation:
        return Relation(self.signature, frozenset(tuple(renaming.get(x, x) for x in t) for t in self.tuples))


@dataclass(frozen=True)
class FiberMap:
    fiber_sort: str
    base_set: tuple[str, ...]
    assignment: ElementMap


@dataclass(frozen=True)
class MultiSortedStructure:
    sorts: Mapping[str, tuple[str, ...]]
    relations: Mapping[str, Relation]
    base_sorts: tuple[str, ...]
    fiber_map: FiberMap | None = None
    supports: Mapping[str, frozenset[str]] = field(default_factory=dict)

    # Lookups

    @cached_property
    def sort_order(self) -> tuple[str, ...]:
        return tuple(self.sorts)

    @cached_property
    def sort_of(self) -> dict[str, str]:
        return {x: sort for sort, elements in self.sorts.items() for x in elements}

    @cached_property
    def elements(self) -> tuple[str, ...]:
        return tuple(x for sort in self.sort_order for x in self.sorts[sort])

    @cached_property
    def element_index(self) -> dict[str, int]:
        return {x: i for i, x in enumerate(self.elements)}

    @cached_property
    def base_elements(self) -> frozenset[str]:
        return frozenset(x for sort in self.base_sorts for x in self.sorts.get(sort, ()))

    @cached_property
    def all_relations(self) -> dict[str, Relation]:
        """Named relations plus the graph of the fiber map."""
        relations = dict(self.relations)
        if self.fiber_map is not None and self.fiber_map.base_set:
            point_sort = self.sort_of.get(self.fiber_map.base_set[0], "")
            relations[FIBER_RELATION] = Relation((self.fiber_map.fiber_sort, point_sort), frozenset(self.fiber_map.assignment.pairs))
        return relations

    @cached_property
    def tuples_by_element(self) -> dict[str, list[tuple[str, tuple[str, ...]]]]:
        index: dict[str, list[tuple[str, tuple[str, ...]]]] = defaultdict(list)
        for name in sorted(self.all_relations):
            for t in sorted(self.all_relations[name].tuples):
                for x in set(t):
                    index[x].append((name, t))
        return index

    def require_element(self, element: str) -> None:
        if element not in self.sort_of:
            raise UnknownIdentifierError(element, "element")

    def require_sort(self, sort: str) -> None:
        if sort not in self.sorts:
            raise UnknownIdentifierError(sort, "sort")

    def fiber(self, point: str) -> tuple[str, ...]:
        if self.fiber_map is None:
            return ()
        if point not in self.fiber_map.base_set:
            raise UnknownIdentifierError(point, "base point")
        return tuple(sorted(x for x, a in self.fiber_map.assignment.pairs if a == point))

    def fiber_over(self, points: Iterable[str]) -> tuple[str, ...]:
        """S_c̄, the union of the fibers over the given points."""
        wanted = set(points)
        for point in wanted:
            self.fiber(point)
        return tuple(sorted(x for x, a in self.fiber_map.assignment.pairs if a in wanted)) if self.fiber_map else ()

    # Diagnostics

    def validate(self) -> ValidationReport:
        report = ValidationReport()
        seen: dict[str, str] = {}
        for sort, elements in self.sorts.items():
            for x in elements:
                if x in seen:
                    report.add("duplicate-element", f"element '{x}' is in sorts '{seen[x]}' and '{sort}'", x)
                seen.setdefault(x, sort)
        for sort in self.base_sorts:
            if sort not in self.sorts:
                report.add("unknown-sort", f"base sort '{sort}' is not declared", sort)
        for name, relation in sorted(self.relations.items()):
            for sort in relation.signature:
                if sort not in self.sorts:
                    report.add("unknown-sort", f"relation '{name}' uses undeclared sort '{sort}'", name)
            for t in sorted(relation.tuples):
                if len(t) != relation.arity or any(seen.get(x) != s for x, s in zip(t, relation.signature)):
                    report.add("signature", f"tuple {t} of '{name}' does not match {relation.signature}", name)
                    break
        if self.fiber_map is not None:
            fiber = self.fiber_map
            if fiber.fiber_sort not in self.sorts:
                report.add("fiber-map", f"fiber sort '{fiber.fiber_sort}' is not declared", fiber.fiber_sort)
            else:
                if fiber.assignment.domain != frozenset(self.sorts[fiber.fiber_sort]):
                    report.add("fiber-map", "fiber map is not total on its sort", fiber.fiber_sort)
                if fiber.assignment.image != frozenset(fiber.base_set):
                    report.add("fiber-map", "fiber map is not onto its declared base set", fiber.fiber_sort)
            point_sorts = {seen.get(a) for a in fiber.base_set}
            if len(point_sorts) != 1 or not point_sorts <= set(self.base_sorts):
                report.add("fiber-map", "base set must lie in a single base sort", fiber.fiber_sort)
        points = set(self.fiber_map.base_set) if self.fiber_map else set()
        for x, support in sorted(self.supports.items()):
            if x not in seen or not support <= points:
                report.add("support", f"support of '{x}' is not a subset of A", x)
        return report

    def first_broken_tuple(self, mapping: ElementMap) -> tuple[str, tuple[str, ...]] | None:
        """The first relation tuple (in name, tuple order) whose image is not a tuple."""
        for name in sorted(self.all_relations):
            relation = self.all_relations[name]
            for t in sorted(relation.tuples):
                image = tuple(mapping.get(x, x) for x in t)
                if image not in relation.tuples:
                    return name, t
        return None

    def is_automorphism(self, mapping: ElementMap) -> bool:
        for sort, elements in self.sorts.items():
            images = [mapping.get(x, x) for x in elements]
            if set(images) != set(elements):
                return False
        return self.first_broken_tuple(mapping) is None

    def per_sort(self, mapping: ElementMap) -> dict[str, ElementMap]:
        return {sort: mapping.restrict(elements) for sort, elements in self.sorts.items()}

    # Derived structures

    def without_relations(self) -> MultiSortedStructure:
        return MultiSortedStructure(dict(self.sorts), {}, self.base_sorts, self.fiber_map, dict(self.supports))

    def with_relations(self, relations: Mapping[str, Relation]) -> MultiSortedStructure:
        return MultiSortedStructure(
            dict(self.sorts), {**self.relations, **relations}, self.base_sorts, self.fiber_map, dict(self.supports)
        )

    def rename(self, renaming: Mapping[str, str], sort_renaming: Mapping[str, str] | None = None) -> MultiSortedStructure:
        """Relabel elements (and optionally sorts); base elements are kept when not renamed."""
        sort_renaming = sort_renaming or {}

        def sort_name(sort: str) -> str:
            return sort_renaming.get(sort, sort)

        fiber_map = None
        if self.fiber_map is not None:
            fiber_map = FiberMap(
                sort_name(self.fiber_map.fiber_sort),
                tuple(renaming.get(a, a) for a in self.fiber_map.base_set),
                self.fiber_map.assignment.rename(renaming),
            )
        return MultiSortedStructure(
            sorts={sort_name(s): tuple(renaming.get(x, x) for x in xs) for s, xs in self.sorts.items()},
            relations={
                name: Relation(tuple(sort_name(s) for s in r.signature), r.rename(renaming).tuples)
                for name, r in self.relations.items()
            },
            base_sorts=tuple(sort_name(s) for s in self.base_sorts),
            fiber_map=fiber_map,
            supports={renaming.get(x, x): s for x, s in self.supports.items()},
        )

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "sorts": {sort: list(elements) for sort, elements in self.sorts.items()},
            "relations": {
                name: {"signature": list(r.signature), "tuples": [list(t) for t in sorted(r.tuples)]}
                for name, r in sorted(self.relations.items())
            },
            "base_sorts": list(self.base_sorts),
        }
        if self.fiber_map is not None:
            data["fiber_map"] = {
                "fiber_sort": self.fiber_map.fiber_sort,
                "base_set": list(self.fiber_map.base_set),
                "assignment": dict(self.fiber_map.assignment.pairs),
            }
        if self.supports:
            data["supports"] = {x: sorted(s) for x, s in sorted(self.supports.items())}
        return data

    def __str__(self):
        sizes = ", ".join(f"{sort}:{len(xs)}" for sort, xs in self.sorts.items())
        return f"MultiSortedStructure({sizes}; {len(self.relations)} relations)"


def disjoint_cover_copy(
    structure: MultiSortedStructure, tag: str, rename_sorts: bool = True
) -> tuple[MultiSortedStructure, dict[str, str]]:
    """A copy sharing the base elements; every non-base element (and sort, unless kept) gets `tag` as prefix."""
    renaming = {x: f"{tag}{x}" for x in structure.elements if x not in structure.base_elements}
    sort_renaming = {s: f"{tag}{s}" for s in structure.sorts if s not in structure.base_sorts and rename_sorts}
    return structure.rename(renaming, sort_renaming), renaming
