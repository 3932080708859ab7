"""
The cover C(G) of a simplicial groupoid or of a plain groupoid, and the
checks that it binds G.

Over the 𝕌-part encoding of G, every point a gets a fresh copy O_*[a] of its
chosen object; O_*[c̄] is the union of the copies over c̄, identified with the
chosen object over c̄ through the inclusion system. Three auxiliary sorts
carry graphs:

    O*  fiber sort, elements "{tag}[a]x"
    M*  maps between O_*[c̄] and objects over c̄: direction 0 into O_*,
        direction 1 out of O_*, direction 2 automorphisms of O_*
    N*  inclusions between consecutive degrees that touch O_*: direction 0
        from O_*[c̄] to an object, 1 from an object to O_*[d̄], 2 between copies
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

from modules.CoherentFamily import find_coherent_family
from modules.ConcreteGroupoid import ConcreteGroupoid
from modules.ElementMap import Arrow, ElementMap
from modules.Errors import NotCoherentError, PreconditionError, UnknownIdentifierError
from modules.GroupoidMorphismSet import GroupoidMorphismSet
from modules.InclusionSystem import InclusionSystem, build_inclusion_system
from modules.IsomorphismSearch import IsomorphismSearch, automorphism_group
from modules.MultiSortedStructure import FiberMap, MultiSortedStructure, Relation
from modules.SimplicialGroupoid import SimplicialGroupoid, label_subset
from modules.SimplicialMorphism import SimplicialMorphism
from modules.StructureAnalyzer import StructureAnalyzer
from modules.UniverseEncoding import UniverseEncoding, encode_simplicial
from modules.ValidationReport import CheckResult

logger = logging.getLogger(__name__)

STAR_SORT = "O*"
MAP_SORT = "M*"
INCLUSION_SORT = "N*"


@dataclass(frozen=True)
class CoverConstruction:
    source_groupoid: SimplicialGroupoid
    inclusion_system: InclusionSystem
    encoding: UniverseEncoding
    copies: Mapping[str, Arrow]
    result: MultiSortedStructure
    tag: str

    def star_object(self, label: str) -> tuple[str, ...]:
        if label not in self.copies:
            raise UnknownIdentifierError(label, "component")
        return tuple(sorted(self.copies[label].mapping.image))

    def copy_map(self, label: str) -> ElementMap:
        """f_c̄ from the chosen object over c̄ onto O_*[c̄]."""
        if label not in self.copies:
            raise UnknownIdentifierError(label, "component")
        return self.copies[label].mapping

    @cached_property
    def star_elements(self) -> tuple[str, ...]:
        return self.result.sorts[STAR_SORT]


def _star_element(tag: str, point: str, x: str) -> str:
    return f"{tag}[{point}]{x}"


def build_cover_from_simplicial(
    groupoid: SimplicialGroupoid,
    encoding: UniverseEncoding | None = None,
    system: InclusionSystem | None = None,
    tag: str = "*",
) -> CoverConstruction:
    report = groupoid.validate()
    if not report.is_valid:
        raise PreconditionError(f"Not a valid simplicial groupoid: {report.violations[0].message}")
    union_property = groupoid.check_disjoint_union_property()
    if not union_property:
        raise PreconditionError(f"Disjoint union property fails: {union_property.counterexample}")
    faithful = [n for n, level in groupoid.degree_groupoids.items() if not level.is_finitely_faithful()]
    if faithful:
        raise PreconditionError(f"Degree {faithful[0]} is not finitely faithful")
    encoding = encoding or encode_simplicial(groupoid)
    if encoding.groupoid is not groupoid and encoding.groupoid != groupoid:
        raise PreconditionError("The encoding belongs to another simplicial groupoid")
    system = system or build_inclusion_system(groupoid)
    system_report = system.validate(groupoid)
    if not system_report.is_valid:
        raise PreconditionError(f"Inclusion system is not valid: {system_report.violations[0].message}")

    code = encoding.element_code
    points = groupoid.base_set
    copies: dict[str, Arrow] = {}
    fiber_of: dict[str, str] = {}
    for a in points:
        chosen = system.chosen_object[a]
        mapping = {x: _star_element(tag, a, x) for x in sorted(groupoid.object_elements(chosen))}
        fiber_of.update({y: a for y in mapping.values()})
        copies[a] = Arrow(chosen, f"{tag}[{a}]", ElementMap.from_dict(mapping))
    for label in system.labels:
        subset = sorted(label_subset(label))
        if len(subset) == 1:
            continue
        graph = {}
        for a in subset:
            leg = system.map_for(a, label)
            for x, y in copies[a].mapping.pairs:
                graph[leg(x)] = y
        copies[label] = Arrow(system.chosen_object[label], f"{tag}[{label}]", ElementMap.from_dict(graph))

    star = tuple(sorted(fiber_of))
    maps_in, maps_out, maps_aut = set(), set(), set()
    map_object, map_elements = set(), []
    supports: dict[str, frozenset[str]] = {}
    for label in system.labels:
        n = len(label_subset(label))
        chosen = system.chosen_object[label]
        f = copies[label].mapping
        f_inverse = f.inverse()
        index = 0
        for name in groupoid.objects_over(label_subset(label)):
            for direction, arrows in ((0, groupoid.arrows(name, chosen)), (1, groupoid.arrows(chosen, name))):
                for arrow in arrows:
                    element = f"m{tag}[{label}]{direction}:{index}"
                    index += 1
                    map_elements.append(element)
                    supports[element] = label_subset(label)
                    map_object.add((element, encoding.object_code[name]))
                    if direction == 0:
                        maps_in.update((element, code[x], f(y)) for x, y in arrow.mapping.pairs)
                    else:
                        maps_out.update((element, y, code[arrow.mapping(x)]) for y, x in f_inverse.pairs)
        for arrow in groupoid.arrows(chosen, chosen):
            element = f"m{tag}[{label}]2:{index}"
            index += 1
            map_elements.append(element)
            supports[element] = label_subset(label)
            conjugate = f.after(arrow.mapping).after(f_inverse)
            maps_aut.update((element, x, y) for x, y in conjugate.pairs)
        logger.debug("Degree %d component %s: %d map elements", n, label, index)

    inc_from_star, inc_to_star, inc_between = set(), set(), set()
    inclusion_object, inclusion_elements = set(), []
    for small in system.labels:
        small_set = label_subset(small)
        for big in system.labels:
            big_set = label_subset(big)
            if not (small_set < big_set and len(big_set) == len(small_set) + 1):
                continue
            f_small, f_big = copies[small].mapping, copies[big].mapping
            small_chosen, big_chosen = system.chosen_object[small], system.chosen_object[big]
            key = f"{small}|{big}"
            index = 0

            def fresh(direction: int) -> str:
                nonlocal index
                element = f"n{tag}[{key}]{direction}:{index}"
                index += 1
                inclusion_elements.append(element)
                supports[element] = big_set
                return element

            for name in groupoid.objects_over(big_set):
                for arrow in groupoid.arrows(small_chosen, name):
                    element = fresh(0)
                    inclusion_object.add((element, encoding.object_code[name]))
                    inc_from_star.update((element, f_small(x), code[y]) for x, y in arrow.mapping.pairs)
            for name in groupoid.objects_over(small_set):
                for arrow in groupoid.arrows(name, big_chosen):
                    element = fresh(1)
                    inclusion_object.add((element, encoding.object_code[name]))
                    inc_to_star.update((element, code[x], f_big(y)) for x, y in arrow.mapping.pairs)
            for arrow in groupoid.arrows(small_chosen, big_chosen):
                element = fresh(2)
                inc_between.update((element, f_small(x), f_big(y)) for x, y in arrow.mapping.pairs)

    base = encoding.structure
    elt_sort = f"{encoding.prefix}Elt"
    ob_sort = f"{encoding.prefix}Ob"
    sorts = dict(base.sorts)
    sorts[STAR_SORT] = star
    sorts[MAP_SORT] = tuple(map_elements)
    sorts[INCLUSION_SORT] = tuple(inclusion_elements)
    relations = dict(base.relations)
    relations.update(
        {
            "star_map_in": Relation((MAP_SORT, elt_sort, STAR_SORT), frozenset(maps_in)),
            "star_map_out": Relation((MAP_SORT, STAR_SORT, elt_sort), frozenset(maps_out)),
            "star_aut": Relation((MAP_SORT, STAR_SORT, STAR_SORT), frozenset(maps_aut)),
            "star_map_object": Relation((MAP_SORT, ob_sort), frozenset(map_object)),
            "star_inc_from": Relation((INCLUSION_SORT, STAR_SORT, elt_sort), frozenset(inc_from_star)),
            "star_inc_to": Relation((INCLUSION_SORT, elt_sort, STAR_SORT), frozenset(inc_to_star)),
            "star_inc_between": Relation((INCLUSION_SORT, STAR_SORT, STAR_SORT), frozenset(inc_between)),
            "star_inc_object": Relation((INCLUSION_SORT, ob_sort), frozenset(inclusion_object)),
        }
    )
    fiber_map = FiberMap(STAR_SORT, tuple(points), ElementMap.from_dict(fiber_of))
    result = MultiSortedStructure(sorts, relations, base.base_sorts, fiber_map, supports)
    logger.info(
        "Built cover with %d fiber, %d map and %d inclusion elements",
        len(star),
        len(map_elements),
        len(inclusion_elements),
    )
    return CoverConstruction(groupoid, system, encoding, copies, result, tag)


def component_point(component: str) -> str:
    """Base point standing for one component of a plain groupoid."""
    return component.replace(",", "+") or "0"


def groupoid_as_simplicial(groupoid: ConcreteGroupoid) -> SimplicialGroupoid:
    """G as a degree-1 simplicial groupoid with one base point per component."""
    points = {component: component_point(component) for component in groupoid.components}
    level = ConcreteGroupoid(
        objects=groupoid.objects,
        component_of={name: points[groupoid.component_of.get(name, "")] for name in groupoid.object_ids},
        component_label={point: frozenset({point}) for point in points.values()},
        morphisms=groupoid.morphisms,
    )
    return SimplicialGroupoid(tuple(sorted(points.values())), {1: level}, {})


def build_cover_from_groupoid(groupoid: ConcreteGroupoid, tag: str = "*") -> CoverConstruction:
    """
    C(G) for a plain groupoid, connected or not: one extra object O_*[a] in
    each component, linked to the objects of that component by the maps of G.
    """
    return build_cover_from_simplicial(groupoid_as_simplicial(groupoid), tag=tag)


def groupoid_binding_group(construction: CoverConstruction, label: str) -> list[ElementMap]:
    """Aut of the chosen object over c̄, conjugated onto O_*[c̄]."""
    f = construction.copy_map(label)
    chosen = construction.inclusion_system.chosen_object[label]
    conjugates = {f.after(g.mapping).after(f.inverse()) for g in construction.source_groupoid.arrows(chosen, chosen)}
    return sorted(conjugates, key=lambda g: g.signature)


def structure_binding_group(construction: CoverConstruction, label: str) -> list[ElementMap]:
    """Aut(C / 𝕌) projected onto O_*[c̄]."""
    result = construction.result
    elements = construction.star_object(label)
    group = automorphism_group(result, fixed_elements=result.base_elements)
    return sorted({g.restrict(elements) for g in group}, key=lambda g: g.signature)


def verify_binding_statement(construction: CoverConstruction, label: str) -> CheckResult:
    from_groupoid = groupoid_binding_group(construction, label)
    from_structure = structure_binding_group(construction, label)
    holds = from_groupoid == from_structure
    counterexample = None
    if not holds:
        only_groupoid = sorted(set(from_groupoid) - set(from_structure), key=lambda g: g.signature)
        only_structure = sorted(set(from_structure) - set(from_groupoid), key=lambda g: g.signature)
        counterexample = {
            "groupoid_only": [g.signature for g in only_groupoid[:1]],
            "structure_only": [g.signature for g in only_structure[:1]],
        }
    return CheckResult(
        holds,
        counterexample,
        {"component": label, "groupoid_order": len(from_groupoid), "structure_order": len(from_structure)},
    )


def _universe_part(construction: CoverConstruction) -> MultiSortedStructure:
    base = construction.encoding.structure
    return MultiSortedStructure(dict(base.sorts), dict(base.relations), base.base_sorts)


def _induced_morphism(construction: CoverConstruction, sigma: ElementMap) -> SimplicialMorphism:
    """The automorphism of G that a permutation of the 𝕌-part fixing A induces."""
    groupoid = construction.source_groupoid
    encoding = construction.encoding
    elements = encoding.decode_elements()
    objects = encoding.decode_objects()
    element_map = {elements[x]: elements[y] for x, y in sigma.pairs if x in elements}
    object_map = {objects[x]: objects[y] for x, y in sigma.pairs if x in objects}
    degree_morphisms = {}
    for n, level in groupoid.degree_groupoids.items():
        maps = set()
        for source in level.object_ids:
            for target in level.object_ids:
                for g in level.hom(source, target):
                    image = {x: element_map[y] for x, y in g.mapping.pairs}
                    maps.add(Arrow(source, object_map[target], ElementMap.from_dict(image)))
        degree_morphisms[n] = GroupoidMorphismSet(level, level, frozenset(maps))
    return SimplicialMorphism(groupoid, groupoid, degree_morphisms)


def _full_lift(construction: CoverConstruction, sigma: ElementMap, tau: ElementMap) -> ElementMap | None:
    """Extend σ on 𝕌 and τ on O_* to the auxiliary sorts by transporting graphs."""
    result = construction.result
    psi = sigma.union(tau).as_dict
    images: dict[str, str] = {}
    for sort, relation_names in ((MAP_SORT, ("star_map_in", "star_map_out", "star_aut", "star_map_object")),
                                 (INCLUSION_SORT, ("star_inc_from", "star_inc_to", "star_inc_between", "star_inc_object"))):
        graphs: dict[str, set[tuple[str, tuple[str, ...]]]] = {x: set() for x in result.sorts[sort]}
        for name in relation_names:
            for t in result.relations[name].tuples:
                graphs[t[0]].add((name, t[1:]))
        index = {frozenset(graph): x for x, graph in graphs.items()}
        for x, graph in graphs.items():
            moved = frozenset((name, tuple(psi[y] for y in rest)) for name, rest in graph)
            if moved not in index:
                return None
            images[x] = index[moved]
    return sigma.union(tau).union(ElementMap.from_dict(images))


def verify_cover(construction: CoverConstruction) -> CheckResult:
    """
    Every automorphism of the 𝕌-part lifts to the cover. Automorphisms fixing
    A pointwise are also lifted through a coherent family for the induced
    automorphism of G, and that lift is checked to be an automorphism.
    """
    result = construction.result
    universe = _universe_part(construction)
    sigmas = automorphism_group(universe)
    points = set(construction.source_groupoid.base_set)
    coherent_lifts = 0
    for sigma in sigmas:
        lift = IsomorphismSearch(result, result, assignments=sigma.as_dict, limit=1).first()
        if lift is None:
            return CheckResult(False, {"route": "search", "automorphism": sigma.signature})
        if any(sigma(a) != a for a in points):
            continue
        morphism = _induced_morphism(construction, sigma)
        system = construction.inclusion_system
        try:
            family = find_coherent_family(morphism, system, system)
        except NotCoherentError:
            logger.info("No coherent family for %s", sigma.signature)
            return CheckResult(False, {"route": "coherent", "automorphism": sigma.signature})
        tau = {}
        for a in construction.source_groupoid.base_set:
            f = construction.copies[a].mapping
            for x, y in family.maps[a].mapping.pairs:
                tau[f(x)] = f(y)
        full = _full_lift(construction, sigma, ElementMap.from_dict(tau))
        if full is None or not result.is_automorphism(full):
            return CheckResult(False, {"route": "coherent", "automorphism": sigma.signature})
        coherent_lifts += 1
    return CheckResult(True, None, {"automorphisms": len(sigmas), "coherent_lifts": coherent_lifts})


def verify_local_embeddedness(
    construction: CoverConstruction, small: str, big: str, analyzer: StructureAnalyzer | None = None
) -> CheckResult:
    """(𝕌, O_*[c̄]) is stably embedded in (𝕌, O_*[d̄]) for c̄ ⊂ d̄."""
    if not label_subset(small) < label_subset(big):
        raise PreconditionError(f"{{{small}}} is not a proper subset of {{{big}}}")
    analyzer = analyzer or StructureAnalyzer()
    result = construction.result
    kwargs = dict(fix_base=True, orbit_sorts=[STAR_SORT])
    inner = analyzer.restrict_structure(result, fiber_subset=label_subset(small), **kwargs)
    outer = analyzer.restrict_structure(result, fiber_subset=label_subset(big), **kwargs)
    return analyzer.check_stable_embedding(outer, inner, fix_base=True)
