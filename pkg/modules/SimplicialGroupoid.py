"""
Simplicial groupoids over a finite base set A.

Degree n carries a concrete groupoid whose components are the n-element
subsets of A (component id = comma-joined sorted subset). For n < m the
inclusion morphism set ι_{n,m} holds injective maps from degree-n objects into
degree-m objects over supersets.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, product
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from modules.ConcreteGroupoid import ConcreteGroupoid
from modules.ElementMap import Arrow, ElementMap, generate_permutation_group, sorted_arrows
from modules.Errors import InvariantBreachError, PreconditionError, UnknownIdentifierError
from modules.GroupoidMorphismSet import (
    GroupoidMorphismSet,
    check_condition_A,
    check_condition_Bprime,
    check_relation_compatibility,
    compose_morphism_sets,
)
from modules.ValidationReport import CheckResult, ValidationReport

logger = logging.getLogger(__name__)


def subset_label(subset: Iterable[str]) -> str:
    return ",".join(sorted(subset))


def label_subset(label: str) -> frozenset[str]:
    return frozenset(label.split(",")) if label else frozenset()


def nonempty_subsets(points: Sequence[str], max_size: int) -> list[tuple[str, ...]]:
    ordered = sorted(points)
    return [combo for size in range(1, max_size + 1) for combo in combinations(ordered, size)]


def set_partitions(items: Sequence[str]) -> Iterator[list[tuple[str, ...]]]:
    """Every partition of `items` into non-empty blocks, blocks in first-element order."""
    if not items:
        yield []
        return
    first, rest = items[0], list(items[1:])
    for partition in set_partitions(rest):
        yield [(first,)] + partition
        for index in range(len(partition)):
            block = tuple(sorted((first,) + partition[index]))
            yield partition[:index] + [block] + partition[index + 1:]


@dataclass(frozen=True)
class SimplicialGroupoid:
    base_set: tuple[str, ...]
    degree_groupoids: Mapping[int, ConcreteGroupoid]
    inclusions: Mapping[tuple[int, int], GroupoidMorphismSet]

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(sorted(self.degree_groupoids))

    @cached_property
    def max_degree(self) -> int:
        return max(self.degrees) if self.degrees else 0

    @cached_property
    def object_degree(self) -> dict[str, int]:
        return {name: n for n, groupoid in self.degree_groupoids.items() for name in groupoid.objects}

    def _require_object(self, name: str) -> int:
        if name not in self.object_degree:
            raise UnknownIdentifierError(name, "object")
        return self.object_degree[name]

    def groupoid_of(self, name: str) -> ConcreteGroupoid:
        return self.degree_groupoids[self._require_object(name)]

    def object_label(self, name: str) -> str:
        return self.groupoid_of(name).component_of[name]

    def object_subset(self, name: str) -> frozenset[str]:
        return label_subset(self.object_label(name))

    def object_elements(self, name: str) -> frozenset[str]:
        return self.groupoid_of(name).objects[name]

    def objects_over(self, subset: Iterable[str]) -> tuple[str, ...]:
        label = subset_label(subset)
        n = len(label_subset(label))
        if n not in self.degree_groupoids:
            return ()
        return self.degree_groupoids[n].objects_in(label)

    def labels(self) -> list[str]:
        return [subset_label(s) for s in nonempty_subsets(self.base_set, self.max_degree)]

    def arrows(self, source: str, target: str) -> tuple[Arrow, ...]:
        """Hom-set when degrees agree, inclusion maps when the source degree is lower."""
        n = self._require_object(source)
        m = self._require_object(target)
        if n == m:
            return self.degree_groupoids[n].hom(source, target)
        if n < m and (n, m) in self.inclusions:
            return self.inclusions[(n, m)].maps_between(source, target)
        return ()

    def contains_arrow(self, arrow: Arrow) -> bool:
        return arrow in set(self.arrows(arrow.source, arrow.target))

    # Diagnostics

    def validate(self) -> ValidationReport:
        report = ValidationReport()
        points = frozenset(self.base_set)
        for n in self.degrees:
            groupoid = self.degree_groupoids[n]
            report.extend(groupoid.validate(), prefix=f"degree {n}: ")
            for component, label in sorted(groupoid.component_label.items()):
                if len(label) != n or not label <= points or component != subset_label(label):
                    report.add("component-label", f"degree {n}: component '{component}' is not an {n}-subset of A", component)
            present = set(groupoid.component_label)
            for subset in combinations(sorted(points), n):
                if subset_label(subset) not in present:
                    report.add("missing-component", f"degree {n}: no component over {{{subset_label(subset)}}}", subset_label(subset))

        for n, m in combinations(self.degrees, 2):
            inclusion = self.inclusions.get((n, m))
            if inclusion is None:
                report.add("missing-inclusion", f"no inclusion set from degree {n} to degree {m}", f"{n},{m}")
                continue
            well_formed = inclusion.validate()
            report.extend(well_formed, prefix=f"inclusion {n}->{m}: ")
            if not well_formed.is_valid:
                continue
            for arrow in inclusion.sorted_maps:
                if not arrow.mapping.is_injective():
                    report.add("injectivity", f"inclusion map {arrow.morphism_id} is not injective", arrow.morphism_id)
            source, target = self.degree_groupoids[n], self.degree_groupoids[m]
            relation = {
                (c, d)
                for c, c_label in source.component_label.items()
                for d, d_label in target.component_label.items()
                if c_label < d_label
            }
            compatible = check_relation_compatibility(inclusion, relation)
            if not compatible:
                report.add("relation", f"inclusion {n}->{m} is not compatible with ⊂: {compatible.counterexample}", f"{n},{m}")
            condition_a = check_condition_A(inclusion)
            if not condition_a:
                report.add("condition-A", f"inclusion {n}->{m} fails (A): {condition_a.counterexample}", f"{n},{m}")
            condition_b = check_condition_Bprime(inclusion)
            if not condition_b:
                report.add("condition-Bprime", f"inclusion {n}->{m} fails (B'): {condition_b.counterexample}", f"{n},{m}")

        for k, n, m in combinations(self.degrees, 3):
            if not all(pair in self.inclusions for pair in ((k, n), (n, m), (k, m))):
                continue
            composite = compose_morphism_sets(self.inclusions[(n, m)], self.inclusions[(k, n)])
            if composite.maps != self.inclusions[(k, m)].maps:
                report.add("composition", f"ι_{{{n},{m}}} ∘ ι_{{{k},{n}}} differs from ι_{{{k},{m}}}", f"{k},{n},{m}")
        return report

    def check_disjoint_union_property(self) -> CheckResult:
        """Inclusion legs over any partition of d̄ assemble to a bijection onto O_d̄."""
        for m in self.degrees:
            if m < 2:
                continue
            groupoid = self.degree_groupoids[m]
            for component in sorted(groupoid.component_label):
                points = sorted(groupoid.component_label[component])
                for target in groupoid.objects_in(component):
                    elements = groupoid.objects[target]
                    for partition in set_partitions(points):
                        if len(partition) < 2:
                            continue
                        block_objects = [self.objects_over(block) for block in partition]
                        for choice in product(*block_objects):
                            legs = [self.arrows(obj, target) for obj in choice]
                            for maps in product(*legs):
                                images: set[str] = set()
                                overlap = False
                                for arrow in maps:
                                    if images & arrow.mapping.image:
                                        overlap = True
                                    images |= arrow.mapping.image
                                if overlap or images != elements:
                                    return CheckResult(
                                        False,
                                        {
                                            "target": target,
                                            "partition": [list(block) for block in partition],
                                            "maps": [arrow.morphism_id for arrow in maps],
                                            "reason": "overlap" if overlap else "not onto",
                                        },
                                    )
        return CheckResult(True)

    # Derived groupoids

    def restrict_base(self, points: Iterable[str]) -> SimplicialGroupoid:
        keep = frozenset(points)
        if not keep <= frozenset(self.base_set):
            raise UnknownIdentifierError(subset_label(keep - frozenset(self.base_set)), "base point")
        degree_groupoids = {}
        for n, groupoid in self.degree_groupoids.items():
            if n > len(keep):
                continue
            names = [name for name in groupoid.object_ids if label_subset(groupoid.component_of[name]) <= keep]
            restricted = groupoid.restrict_to_objects(names)
            labels = {c: l for c, l in groupoid.component_label.items() if l <= keep}
            degree_groupoids[n] = ConcreteGroupoid(restricted.objects, restricted.component_of, labels, restricted.morphisms)
        inclusions = {}
        for (n, m), inclusion in self.inclusions.items():
            if n not in degree_groupoids or m not in degree_groupoids:
                continue
            source, target = degree_groupoids[n], degree_groupoids[m]
            maps = frozenset(a for a in inclusion.maps if a.source in source.objects and a.target in target.objects)
            inclusions[(n, m)] = GroupoidMorphismSet(source, target, maps)
        return SimplicialGroupoid(tuple(sorted(keep)), degree_groupoids, inclusions)

    def rename(self, objects: Mapping[str, str], elements: Mapping[str, str]) -> SimplicialGroupoid:
        degree_groupoids = {n: g.rename(objects, elements) for n, g in self.degree_groupoids.items()}
        inclusions = {}
        for (n, m), inclusion in self.inclusions.items():
            maps = frozenset(
                Arrow(objects.get(a.source, a.source), objects.get(a.target, a.target), a.mapping.rename(elements))
                for a in inclusion.maps
            )
            inclusions[(n, m)] = GroupoidMorphismSet(degree_groupoids[n], degree_groupoids[m], maps)
        return SimplicialGroupoid(self.base_set, degree_groupoids, inclusions)

    def __str__(self):
        sizes = ", ".join(f"{n}:{len(g.objects)}" for n, g in sorted(self.degree_groupoids.items()))
        return f"SimplicialGroupoid(A={list(self.base_set)}, objects per degree {{{sizes}}})"


def fill_square(groupoid: SimplicialGroupoid, iota1: Arrow, iota3: Arrow) -> Arrow:
    """
    The unique inclusion ι4: O_ā -> O_āc̄ with ι3 ∘ ι4 = ι1, for ι1: O_ā -> O_ābc̄
    and ι3: O_āc̄ -> O_ābc̄.
    """
    if iota1.target != iota3.target:
        raise PreconditionError(f"{iota1.morphism_id} and {iota3.morphism_id} end at different objects")
    for arrow in (iota1, iota3):
        if not groupoid.contains_arrow(arrow):
            raise PreconditionError(f"{arrow.morphism_id} is not an inclusion of the simplicial groupoid")
    inner = groupoid.object_subset(iota1.source)
    middle = groupoid.object_subset(iota3.source)
    outer = groupoid.object_subset(iota1.target)
    if not inner <= middle <= outer:
        raise PreconditionError(
            f"Components do not nest: {subset_label(inner)} / {subset_label(middle)} / {subset_label(outer)}"
        )
    solutions = [x for x in groupoid.arrows(iota1.source, iota3.source) if iota3.after(x) == iota1]
    if len(solutions) != 1:
        raise InvariantBreachError(
            f"Square {iota1.morphism_id} / {iota3.morphism_id} has {len(solutions)} fillers, expected exactly one"
        )
    return solutions[0]


@dataclass(frozen=True)
class ObjectSpec:
    """An object over `label` identified with the label's reference set by `identification` (token -> element)."""

    name: str
    label: str
    identification: ElementMap


def simplicial_from_reference(
    base_set: Iterable[str],
    reference_sets: Mapping[str, Iterable[str]],
    groups: Mapping[str, Iterable[ElementMap]],
    objects: Iterable[ObjectSpec],
) -> SimplicialGroupoid:
    """
    Materialise a simplicial groupoid from reference data.

    Reference sets must be nested along subset inclusion and Γ_c̄ must equal
    the restriction of Γ_d̄ to R_c̄. Then Hom(O_i, O_j) = φ_j Γ_c̄ φ_i⁻¹ and the
    inclusions O_i -> O_j are φ_j γ|R_c̄ φ_i⁻¹ for γ ∈ Γ_d̄.
    """
    points = tuple(sorted(set(base_set)))
    references = {label: frozenset(tokens) for label, tokens in reference_sets.items()}
    group_lists = {label: tuple(group) for label, group in groups.items()}
    specs = sorted(objects, key=lambda spec: spec.name)
    for spec in specs:
        if spec.label not in references:
            raise UnknownIdentifierError(spec.label, "component")
        if spec.identification.domain != references[spec.label] or not spec.identification.is_injective():
            raise PreconditionError(f"Object '{spec.name}' is not identified with the reference set of {spec.label}")

    by_degree: dict[int, list[ObjectSpec]] = {}
    for spec in specs:
        by_degree.setdefault(len(label_subset(spec.label)), []).append(spec)
    inverse = {spec.name: spec.identification.inverse() for spec in specs}

    degree_groupoids = {}
    for n, members in sorted(by_degree.items()):
        morphisms = set()
        for first in members:
            for second in members:
                if first.label != second.label:
                    continue
                for gamma in group_lists[first.label]:
                    mapping = second.identification.after(gamma).after(inverse[first.name])
                    morphisms.add(Arrow(first.name, second.name, mapping))
        degree_groupoids[n] = ConcreteGroupoid(
            objects={spec.name: spec.identification.image for spec in members},
            component_of={spec.name: spec.label for spec in members},
            component_label={spec.label: label_subset(spec.label) for spec in members},
            morphisms=frozenset(morphisms),
        )

    inclusions = {}
    for n, m in combinations(sorted(by_degree), 2):
        maps = set()
        for small in by_degree[n]:
            small_set = label_subset(small.label)
            for big in by_degree[m]:
                if not small_set < label_subset(big.label):
                    continue
                for gamma in group_lists[big.label]:
                    restricted = gamma.restrict(references[small.label])
                    mapping = big.identification.after(restricted).after(inverse[small.name])
                    maps.add(Arrow(small.name, big.name, mapping))
        inclusions[(n, m)] = GroupoidMorphismSet(degree_groupoids[n], degree_groupoids[m], frozenset(maps))
    return SimplicialGroupoid(points, degree_groupoids, inclusions)


def fibered_simplicial_groupoid(
    base_set: Iterable[str],
    fibers: Mapping[str, Sequence[str]],
    generators: Iterable[Mapping[str, str]] = (),
    max_degree: int | None = None,
    object_names: Mapping[str, str] | None = None,
    element_names: Mapping[tuple[str, str], str] | Callable[[str, str, str], str] | None = None,
    extra_objects: Mapping[str, int] | None = None,
) -> SimplicialGroupoid:
    """
    The simplicial groupoid of a fibered permutation group.

    Every point a carries a fiber of tokens; the generators permute tokens
    fiber by fiber. Over c̄ the reference set is the union of the fibers and
    Γ_c̄ is the restriction of the generated group.
    """
    points = tuple(sorted(set(base_set)))
    top = max_degree or len(points)
    token_point = {token: point for point in points for token in fibers[point]}
    maps = [ElementMap.from_dict(g) for g in generators]
    for generator in maps:
        for token, image in generator.pairs:
            if token_point.get(token) is None or token_point.get(token) != token_point.get(image):
                raise PreconditionError(f"Generator {generator} does not preserve fibers")
    full_group = generate_permutation_group(maps, token_point)

    object_names = object_names or {}
    extra_objects = extra_objects or {}
    reference_sets, groups, specs = {}, {}, []
    for subset in nonempty_subsets(points, top):
        label = subset_label(subset)
        tokens = [token for point in subset for token in fibers[point]]
        reference_sets[label] = tokens
        groups[label] = tuple({g.restrict(tokens) for g in full_group})
        name = object_names.get(label, f"P[{label}]")
        for copy_index in range(1 + extra_objects.get(label, 0)):
            object_name = name if copy_index == 0 else f"{name}~{copy_index}"
            identification = {}
            for token in tokens:
                if callable(element_names):
                    element = element_names(label, token, object_name)
                elif element_names and (label, token) in element_names:
                    element = element_names[(label, token)]
                else:
                    element = f"{name}.{token}"
                identification[token] = element if copy_index == 0 else f"{element}~{copy_index}"
            specs.append(ObjectSpec(object_name, label, ElementMap.from_dict(identification)))
    return simplicial_from_reference(points, reference_sets, groups, specs)


def relabeled_copy(groupoid: SimplicialGroupoid, tag: str) -> tuple[SimplicialGroupoid, dict[str, str], dict[str, str]]:
    """A copy with every object and element prefixed by `tag`; returns the renamings as well."""
    objects = {name: f"{tag}{name}" for name in groupoid.object_degree}
    elements = {
        x: f"{tag}{x}" for g in groupoid.degree_groupoids.values() for xs in g.objects.values() for x in xs
    }
    return groupoid.rename(objects, elements), objects, elements
