"""
Finite-level projective systems of concrete groupoids.

Levels are indexed by a finite join-semilattice. For i ≤ j the projection
π_{i,j} sends each level-j object to a level-i object and restricts a
morphism of level j to the elements it keeps, renaming them into level i.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from modules.ConcreteGroupoid import ConcreteGroupoid
from modules.ElementMap import Arrow, ElementMap
from modules.Errors import PreconditionError, UnknownIdentifierError
from modules.ValidationReport import ValidationReport


@dataclass(frozen=True)
class LevelProjection:
    """Object map level j -> level i, and the partial element map onto level i."""

    object_map: Mapping[str, str]
    element_map: ElementMap

    def project(self, arrow: Arrow) -> Arrow:
        kept = self.element_map.domain
        try:
            pairs = {
                self.element_map(x): self.element_map(y) for x, y in arrow.mapping.pairs if x in kept
            }
        except KeyError:
            raise PreconditionError(f"{arrow.morphism_id} moves a kept element outside the projection") from None
        return Arrow(self.object_map[arrow.source], self.object_map[arrow.target], ElementMap.from_dict(pairs))

    def after(self, inner: LevelProjection) -> LevelProjection:
        """self ∘ inner, for inner: k -> j and self: j -> i."""
        objects = {name: self.object_map[target] for name, target in inner.object_map.items()}
        pairs = {x: self.element_map(y) for x, y in inner.element_map.pairs if y in self.element_map.domain}
        return LevelProjection(objects, ElementMap.from_dict(pairs))


@dataclass(frozen=True)
class ProjectiveGroupoidSystem:
    indices: tuple[str, ...]
    order: frozenset[tuple[str, str]]
    levels: Mapping[str, ConcreteGroupoid]
    projections: Mapping[tuple[str, str], LevelProjection]

    @cached_property
    def _order(self) -> frozenset[tuple[str, str]]:
        return self.order | {(i, i) for i in self.indices}

    def _require_index(self, index: str) -> None:
        if index not in self.levels:
            raise UnknownIdentifierError(index, "index")

    def leq(self, i: str, j: str) -> bool:
        return (i, j) in self._order

    def join(self, i: str, j: str) -> str:
        self._require_index(i)
        self._require_index(j)
        uppers = [k for k in self.indices if self.leq(i, k) and self.leq(j, k)]
        least = [k for k in uppers if all(self.leq(k, other) for other in uppers)]
        if not least:
            raise PreconditionError(f"Indices '{i}' and '{j}' have no join")
        return least[0]

    def project_system(self, index: str) -> ConcreteGroupoid:
        self._require_index(index)
        return self.levels[index]

    def projection(self, lower: str, upper: str) -> LevelProjection:
        self._require_index(lower)
        self._require_index(upper)
        if lower == upper:
            level = self.levels[lower]
            elements = [x for xs in level.objects.values() for x in xs]
            return LevelProjection({name: name for name in level.objects}, ElementMap.identity(elements))
        if (lower, upper) not in self.projections:
            raise UnknownIdentifierError(f"{lower}<={upper}", "projection")
        return self.projections[(lower, upper)]

    def project_morphism(self, arrow: Arrow, upper: str, lower: str) -> Arrow:
        return self.projection(lower, upper).project(arrow)

    def validate_system(self) -> ValidationReport:
        report = ValidationReport()
        for i in self.indices:
            for j in self.indices:
                if i != j and self.leq(i, j) and self.leq(j, i):
                    report.add("order", f"'{i}' and '{j}' are mutually below each other", f"{i},{j}")
                for k in self.indices:
                    if self.leq(i, j) and self.leq(j, k) and not self.leq(i, k):
                        report.add("order", f"order is not transitive at {i} <= {j} <= {k}", f"{i},{j},{k}")
                try:
                    self.join(i, j)
                except PreconditionError:
                    report.add("join", f"'{i}' and '{j}' have no join", f"{i},{j}")

        for (i, j) in sorted(self._order):
            if i == j:
                continue
            if (i, j) not in self.projections:
                report.add("missing-projection", f"no projection from '{j}' to '{i}'", f"{i}<={j}")
                continue
            projection = self.projections[(i, j)]
            lower, upper = self.levels[i], self.levels[j]
            for name in upper.object_ids:
                target = projection.object_map.get(name)
                if target not in lower.objects:
                    report.add("projection-objects", f"object '{name}' has no image in '{i}'", name)
                    continue
                kept = projection.element_map.restrict(upper.objects[name])
                if not kept.is_injective() or kept.image != lower.objects[target]:
                    report.add("projection-bijectivity", f"'{name}' does not project bijectively onto '{target}'", name)
            if not report.is_valid:
                continue
            images = set()
            for arrow in sorted(upper.morphisms):
                try:
                    image = projection.project(arrow)
                except PreconditionError as error:
                    report.add("functoriality", str(error), arrow.morphism_id)
                    continue
                if image not in lower.morphisms:
                    report.add("functoriality", f"{arrow.morphism_id} projects outside level '{i}'", arrow.morphism_id)
                images.add(image)
            missed = len(lower.morphisms) - len(images & lower.morphisms)
            if missed:
                report.notes.append(f"projection {j} -> {i} is not surjective on morphisms ({missed} not hit)")

        for i in self.indices:
            for j in self.indices:
                for k in self.indices:
                    if len({i, j, k}) < 3 or not (self.leq(i, j) and self.leq(j, k)):
                        continue
                    if not all(pair in self.projections for pair in ((i, j), (j, k), (i, k))):
                        continue
                    composite = self.projections[(i, j)].after(self.projections[(j, k)])
                    direct = self.projections[(i, k)]
                    if dict(composite.object_map) != dict(direct.object_map) or composite.element_map != direct.element_map:
                        report.add("composition", f"π_{{{i},{j}}} ∘ π_{{{j},{k}}} differs from π_{{{i},{k}}}", f"{i},{j},{k}")
        return report


def single_level_system(index: str, groupoid: ConcreteGroupoid) -> ProjectiveGroupoidSystem:
    return ProjectiveGroupoidSystem((index,), frozenset(), {index: groupoid}, {})


def linear_system(levels: Iterable[tuple[str, ConcreteGroupoid]]) -> ProjectiveGroupoidSystem:
    """A chain of levels over the same objects and elements; each projection is the identity."""
    ordered = list(levels)
    indices = tuple(index for index, _ in ordered)
    order = frozenset((indices[a], indices[b]) for a in range(len(indices)) for b in range(a + 1, len(indices)))
    projections = {}
    for lower, upper in order:
        level = dict(ordered)[upper]
        elements = [x for xs in level.objects.values() for x in xs]
        projections[(lower, upper)] = LevelProjection({name: name for name in level.objects}, ElementMap.identity(elements))
    return ProjectiveGroupoidSystem(indices, order, dict(ordered), projections)
