"""
Finite functions between element sets and the arrows built from them.

Elements are plain strings that are globally unique inside one groupoid or
structure, so a function is fully described by its sorted list of pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from modules.Errors import PreconditionError


@dataclass(frozen=True)
class ElementMap:
    """A finite function stored as pairs sorted by source element."""

    pairs: tuple[tuple[str, str], ...]

    @classmethod
    def from_dict(cls, mapping: Mapping[str, str]) -> ElementMap:
        return cls(tuple(sorted(mapping.items())))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str] | list[str]]) -> ElementMap:
        mapping = {}
        for source, target in pairs:
            if source in mapping and mapping[source] != target:
                raise PreconditionError(f"Element '{source}' is mapped twice")
            mapping[source] = target
        return cls.from_dict(mapping)

    @classmethod
    def identity(cls, elements: Iterable[str]) -> ElementMap:
        return cls(tuple((x, x) for x in sorted(elements)))

    @cached_property
    def as_dict(self) -> dict[str, str]:
        return dict(self.pairs)

    @cached_property
    def domain(self) -> frozenset[str]:
        return frozenset(source for source, _ in self.pairs)

    @cached_property
    def image(self) -> frozenset[str]:
        return frozenset(target for _, target in self.pairs)

    @cached_property
    def signature(self) -> str:
        return ",".join(f"{source}>{target}" for source, target in self.pairs)

    def __call__(self, element: str) -> str:
        return self.as_dict[element]

    def __len__(self):
        return len(self.pairs)

    def get(self, element: str, default=None):
        return self.as_dict.get(element, default)

    def is_injective(self) -> bool:
        return len(self.image) == len(self.pairs)

    def is_identity(self) -> bool:
        return all(source == target for source, target in self.pairs)

    def after(self, inner: ElementMap) -> ElementMap:
        """Composite self ∘ inner. The image of `inner` must lie in our domain."""
        mine = self.as_dict
        try:
            return ElementMap(tuple(sorted((x, mine[y]) for x, y in inner.pairs)))
        except KeyError as error:
            raise PreconditionError(f"Cannot compose: element {error} outside the domain") from None

    def inverse(self) -> ElementMap:
        if not self.is_injective():
            raise PreconditionError("Only injective maps have an inverse")
        return ElementMap(tuple(sorted((y, x) for x, y in self.pairs)))

    def restrict(self, subset: Iterable[str]) -> ElementMap:
        keep = set(subset)
        return ElementMap(tuple(pair for pair in self.pairs if pair[0] in keep))

    def union(self, other: ElementMap) -> ElementMap:
        merged = dict(self.pairs)
        for source, target in other.pairs:
            if merged.get(source, target) != target:
                raise PreconditionError(f"Maps disagree on '{source}'")
            merged[source] = target
        return ElementMap.from_dict(merged)

    def rename(self, renaming: Mapping[str, str]) -> ElementMap:
        """Transport along a renaming applied to both sides."""
        return ElementMap.from_dict({renaming.get(x, x): renaming.get(y, y) for x, y in self.pairs})

    def __str__(self):
        return "{" + self.signature + "}"


@dataclass(frozen=True)
class Arrow:
    """A map between two named objects. Its id is derived from the graph."""

    source: str
    target: str
    mapping: ElementMap

    @cached_property
    def morphism_id(self) -> str:
        return f"{self.source}->{self.target}[{self.mapping.signature}]"

    def after(self, inner: Arrow) -> Arrow:
        """Composite self ∘ inner."""
        if inner.target != self.source:
            raise PreconditionError(
                f"Cannot compose {self.morphism_id} after {inner.morphism_id}: "
                f"'{inner.target}' is not '{self.source}'"
            )
        return Arrow(inner.source, self.target, self.mapping.after(inner.mapping))

    def inverse(self) -> Arrow:
        return Arrow(self.target, self.source, self.mapping.inverse())

    def __call__(self, element: str) -> str:
        return self.mapping(element)

    def __lt__(self, other: Arrow) -> bool:
        return self.morphism_id < other.morphism_id

    def __str__(self):
        return self.morphism_id


def sorted_arrows(arrows: Iterable[Arrow]) -> tuple[Arrow, ...]:
    return tuple(sorted(set(arrows), key=lambda arrow: arrow.morphism_id))


def generate_permutation_group(generators: Iterable[ElementMap], domain: Iterable[str]) -> tuple[ElementMap, ...]:
    """Closure of permutations of `domain` under composition, identity included."""
    elements = set(domain)
    gens = []
    for generator in generators:
        completed = ElementMap.from_dict({x: generator.get(x, x) for x in elements})
        if completed.image != frozenset(elements) or not completed.is_injective():
            raise PreconditionError(f"Generator {generator} is not a permutation")
        gens.append(completed)
    group = {ElementMap.identity(elements)}
    frontier = list(group)
    while frontier:
        fresh = []
        for g in gens:
            for h in frontier:
                product = g.after(h)
                if product not in group:
                    group.add(product)
                    fresh.append(product)
        frontier = fresh
    return tuple(sorted(group, key=lambda m: m.signature))
