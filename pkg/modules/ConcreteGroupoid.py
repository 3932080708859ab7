"""
Concrete finite groupoids: objects are disjoint finite sets, morphisms are
explicit bijections closed under composition and inverse.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping

from modules.ElementMap import Arrow, ElementMap, sorted_arrows
from modules.Errors import InvariantBreachError, PreconditionError, UnknownIdentifierError
from modules.ValidationReport import CheckResult, ValidationReport


def close_arrows(generators: Iterable[Arrow]) -> set[Arrow]:
    """Close a set of bijective arrows under composition and inverse."""
    known: set[Arrow] = set()
    by_source: dict[str, set[Arrow]] = defaultdict(set)
    by_target: dict[str, set[Arrow]] = defaultdict(set)

    def remember(arrow: Arrow) -> bool:
        if arrow in known:
            return False
        known.add(arrow)
        by_source[arrow.source].add(arrow)
        by_target[arrow.target].add(arrow)
        return True

    frontier = []
    for arrow in generators:
        for candidate in (arrow, arrow.inverse()):
            if remember(candidate):
                frontier.append(candidate)
    while frontier:
        fresh = []
        for arrow in frontier:
            for outer in list(by_source[arrow.target]):
                composite = outer.after(arrow)
                if remember(composite):
                    fresh.append(composite)
            for inner in list(by_target[arrow.source]):
                composite = arrow.after(inner)
                if remember(composite):
                    fresh.append(composite)
        frontier = fresh
    return known


@dataclass(frozen=True)
class ConcreteGroupoid:
    """
    A finite concrete groupoid.

    Attributes:
        objects: object id -> element set (pairwise disjoint)
        component_of: object id -> component id
        component_label: component id -> subset of base elements labelling it
        morphisms: every morphism as an Arrow; ids are derived from the graph
    """

    objects: Mapping[str, frozenset[str]]
    component_of: Mapping[str, str]
    component_label: Mapping[str, frozenset[str]]
    morphisms: frozenset[Arrow]

    @classmethod
    def generate(
        cls,
        objects: Mapping[str, Iterable[str]],
        component_of: Mapping[str, str],
        component_label: Mapping[str, Iterable[str]],
        generators: Iterable[Arrow] = (),
    ) -> ConcreteGroupoid:
        """Build the groupoid generated by identities and the given bijections."""
        frozen_objects = {name: frozenset(elements) for name, elements in objects.items()}
        seeds = [Arrow(name, name, ElementMap.identity(elements)) for name, elements in frozen_objects.items()]
        for arrow in generators:
            if arrow.source not in frozen_objects:
                raise UnknownIdentifierError(arrow.source, "object")
            if arrow.target not in frozen_objects:
                raise UnknownIdentifierError(arrow.target, "object")
            if (
                arrow.mapping.domain != frozen_objects[arrow.source]
                or arrow.mapping.image != frozen_objects[arrow.target]
                or not arrow.mapping.is_injective()
            ):
                raise PreconditionError(f"Generator {arrow.morphism_id} is not a bijection between its objects")
            seeds.append(arrow)
        return cls(
            objects=frozen_objects,
            component_of=dict(component_of),
            component_label={key: frozenset(value) for key, value in component_label.items()},
            morphisms=frozenset(close_arrows(seeds)),
        )

    # Lookups

    @cached_property
    def object_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.objects))

    @cached_property
    def _hom_index(self) -> dict[tuple[str, str], tuple[Arrow, ...]]:
        grouped: dict[tuple[str, str], list[Arrow]] = defaultdict(list)
        for arrow in self.morphisms:
            grouped[(arrow.source, arrow.target)].append(arrow)
        return {key: sorted_arrows(arrows) for key, arrows in grouped.items()}

    @cached_property
    def components(self) -> dict[str, tuple[str, ...]]:
        grouped: dict[str, list[str]] = defaultdict(list)
        for name in self.object_ids:
            grouped[self.component_of.get(name, "")].append(name)
        return {component: tuple(names) for component, names in sorted(grouped.items())}

    @cached_property
    def element_owner(self) -> dict[str, str]:
        return {element: name for name in self.object_ids for element in self.objects[name]}

    def _require_object(self, name: str) -> None:
        if name not in self.objects:
            raise UnknownIdentifierError(name, "object")

    def objects_in(self, component: str) -> tuple[str, ...]:
        return self.components.get(component, ())

    def hom(self, source: str, target: str) -> tuple[Arrow, ...]:
        """Morphisms source -> target as Arrows, sorted by morphism id."""
        self._require_object(source)
        self._require_object(target)
        return self._hom_index.get((source, target), ())

    def hom_set(self, source: str, target: str) -> frozenset[str]:
        return frozenset(arrow.morphism_id for arrow in self.hom(source, target))

    def aut_group(self, name: str) -> tuple[Arrow, ...]:
        """Hom(O, O), checked to be a group."""
        group = self.hom(name, name)
        members = set(group)
        for first in group:
            if first.inverse() not in members:
                raise InvariantBreachError(f"Aut({name}) misses the inverse of {first.morphism_id}")
            for second in group:
                if first.after(second) not in members:
                    raise InvariantBreachError(f"Aut({name}) is not closed under composition")
        return group

    # Diagnostics

    def validate(self) -> ValidationReport:
        report = ValidationReport()
        for name in self.object_ids:
            component = self.component_of.get(name)
            if component is None or component not in self.component_label:
                report.add("unknown-component", f"object '{name}' has no declared component", name)
        owners: dict[str, str] = {}
        for name in self.object_ids:
            for element in sorted(self.objects[name]):
                if element in owners:
                    report.add(
                        "disjointness",
                        f"element '{element}' belongs to '{owners[element]}' and '{name}'",
                        element,
                    )
                owners.setdefault(element, name)

        well_formed: list[Arrow] = []
        for arrow in sorted_arrows(self.morphisms):
            if arrow.source not in self.objects or arrow.target not in self.objects:
                report.add("unknown-object", f"morphism {arrow.morphism_id} references an unknown object", arrow.morphism_id)
                continue
            mapping = arrow.mapping
            if (
                mapping.domain != self.objects[arrow.source]
                or mapping.image != self.objects[arrow.target]
                or not mapping.is_injective()
            ):
                report.add("not-bijective", f"morphism {arrow.morphism_id} is not a bijection", arrow.morphism_id)
                continue
            well_formed.append(arrow)

        present = set(well_formed)
        for name in self.object_ids:
            if Arrow(name, name, ElementMap.identity(self.objects[name])) not in present:
                report.add("identity-missing", f"identity missing on '{name}'", name)
        for arrow in well_formed:
            if arrow.inverse() not in present:
                report.add("inverse-missing", f"inverse missing for {arrow.morphism_id}", arrow.morphism_id)
        by_source: dict[str, list[Arrow]] = defaultdict(list)
        for arrow in well_formed:
            by_source[arrow.source].append(arrow)
        for inner in well_formed:
            for outer in by_source[inner.target]:
                composite = outer.after(inner)
                if composite not in present:
                    report.add(
                        "composition-missing",
                        f"composite {outer.morphism_id} after {inner.morphism_id} missing",
                        composite.morphism_id,
                    )

        connected = {(arrow.source, arrow.target) for arrow in well_formed}
        for first in self.object_ids:
            for second in self.object_ids:
                same = self.component_of.get(first) == self.component_of.get(second)
                if same and (first, second) not in connected:
                    report.add("connectedness", f"'{first}' and '{second}' share a component but no morphism", first)
                elif not same and (first, second) in connected:
                    report.add("connectedness", f"morphism joins '{first}' and '{second}' across components", first)
        return report

    def faithfulness_witnesses(self) -> dict[str, tuple[str, ...]]:
        """Per object, the lexicographically first shortest tuple with trivial pointwise stabilizer."""
        witnesses = {}
        for name in self.object_ids:
            group = self.hom(name, name)
            elements = sorted(self.objects[name])
            found = None
            for length in range(len(elements) + 1):
                for candidate in combinations(elements, length):
                    stabilizer = [g for g in group if all(g(x) == x for x in candidate)]
                    if len(stabilizer) == 1:
                        found = candidate
                        break
                if found is not None:
                    break
            witnesses[name] = found if found is not None else tuple(elements)
        return witnesses

    def is_finitely_faithful(self) -> CheckResult:
        witnesses = self.faithfulness_witnesses()
        return CheckResult(True, None, {"witnesses": {name: list(tup) for name, tup in witnesses.items()}})

    def is_canonical(self) -> bool:
        return all(len(names) == 1 for names in self.components.values())

    # Derived groupoids

    def restrict_to_objects(self, names: Iterable[str]) -> ConcreteGroupoid:
        keep = set(names)
        for name in keep:
            self._require_object(name)
        components = {self.component_of[name] for name in keep}
        return ConcreteGroupoid(
            objects={name: self.objects[name] for name in keep},
            component_of={name: self.component_of[name] for name in keep},
            component_label={c: self.component_label[c] for c in components},
            morphisms=frozenset(a for a in self.morphisms if a.source in keep and a.target in keep),
        )

    def rename(self, objects: Mapping[str, str], elements: Mapping[str, str]) -> ConcreteGroupoid:
        """Relabel object ids and elements; component ids and labels are kept."""
        return ConcreteGroupoid(
            objects={objects.get(n, n): frozenset(elements.get(x, x) for x in xs) for n, xs in self.objects.items()},
            component_of={objects.get(n, n): c for n, c in self.component_of.items()},
            component_label=dict(self.component_label),
            morphisms=frozenset(
                Arrow(objects.get(a.source, a.source), objects.get(a.target, a.target), a.mapping.rename(elements))
                for a in self.morphisms
            ),
        )

    def with_copy_of(self, name: str, new_name: str, tag: str = "'") -> ConcreteGroupoid:
        """Add an isomorphic copy of one object to its component."""
        self._require_object(name)
        if new_name in self.objects:
            raise PreconditionError(f"Object '{new_name}' already exists")
        copy_elements = {x: f"{x}{tag}" for x in self.objects[name]}
        objects = dict(self.objects)
        objects[new_name] = frozenset(copy_elements.values())
        component_of = dict(self.component_of)
        component_of[new_name] = self.component_of[name]
        bridge = Arrow(name, new_name, ElementMap.from_dict(copy_elements))
        return ConcreteGroupoid.generate(objects, component_of, self.component_label, list(self.morphisms) + [bridge])

    def __str__(self):
        return f"ConcreteGroupoid({len(self.objects)} objects, {len(self.morphisms)} morphisms)"
