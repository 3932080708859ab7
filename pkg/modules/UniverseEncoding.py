"""
The 𝕌-part of a cover built from simplicial groupoids.

Each groupoid becomes sorts of elements, objects, morphisms and inclusions
(all prefixed), with membership, `over`, and graph relations. Several
groupoids can share one universe by encoding them in turn on top of the
same base structure; base points of A are shared by name.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from modules.ElementMap import Arrow
from modules.MultiSortedStructure import MultiSortedStructure, Relation
from modules.SimplicialGroupoid import SimplicialGroupoid, label_subset

POINT_SORT = "A"


@dataclass(frozen=True)
class UniverseEncoding:
    structure: MultiSortedStructure
    groupoid: SimplicialGroupoid
    prefix: str
    element_code: Mapping[str, str]
    object_code: Mapping[str, str]
    arrow_code: Mapping[Arrow, str]
    point_sort: str

    def decode_elements(self) -> dict[str, str]:
        return {code: x for x, code in self.element_code.items()}

    def decode_objects(self) -> dict[str, str]:
        return {code: name for name, code in self.object_code.items()}


def encode_simplicial(
    groupoid: SimplicialGroupoid, base: MultiSortedStructure | None = None, prefix: str = ""
) -> UniverseEncoding:
    sorts = dict(base.sorts) if base is not None else {}
    relations = dict(base.relations) if base is not None else {}
    base_sorts = list(base.base_sorts) if base is not None else []
    owner = base.sort_of if base is not None else {}

    point_sort = POINT_SORT
    known_points = [a for a in groupoid.base_set if a in owner]
    if known_points:
        point_sort = owner[known_points[0]]
        missing = [a for a in groupoid.base_set if a not in owner]
        if missing:
            sorts[point_sort] = tuple(sorts[point_sort]) + tuple(missing)
    elif POINT_SORT in sorts:
        sorts[POINT_SORT] = tuple(sorts[POINT_SORT]) + tuple(groupoid.base_set)
    else:
        sorts[POINT_SORT] = tuple(groupoid.base_set)
        base_sorts.append(POINT_SORT)

    elt_sort, ob_sort, mor_sort, inc_sort = (f"{prefix}{name}" for name in ("Elt", "Ob", "Mor", "Inc"))
    element_code: dict[str, str] = {}
    object_code: dict[str, str] = {}
    arrow_code: dict[Arrow, str] = {}
    elt_of, over, mor_graph, mor_ends, inc_graph, inc_ends = (set() for _ in range(6))

    for n in groupoid.degrees:
        level = groupoid.degree_groupoids[n]
        for name in level.object_ids:
            object_code[name] = f"ob:{prefix}{name}"
            for point in sorted(label_subset(level.component_of[name])):
                over.add((object_code[name], point))
            for x in sorted(level.objects[name]):
                element_code[x] = f"elt:{prefix}{x}"
                elt_of.add((element_code[x], object_code[name]))
    for n in groupoid.degrees:
        level = groupoid.degree_groupoids[n]
        for index, arrow in enumerate(sorted(level.morphisms)):
            code = f"mor:{prefix}{n}:{index}"
            arrow_code[arrow] = code
            mor_ends.add((code, object_code[arrow.source], object_code[arrow.target]))
            mor_graph.update((code, element_code[x], element_code[y]) for x, y in arrow.mapping.pairs)
    for (n, m), inclusion in sorted(groupoid.inclusions.items()):
        for index, arrow in enumerate(inclusion.sorted_maps):
            code = f"inc:{prefix}{n}.{m}:{index}"
            arrow_code[arrow] = code
            inc_ends.add((code, object_code[arrow.source], object_code[arrow.target]))
            inc_graph.update((code, element_code[x], element_code[y]) for x, y in arrow.mapping.pairs)

    sorts[elt_sort] = tuple(element_code.values())
    sorts[ob_sort] = tuple(object_code.values())
    sorts[mor_sort] = tuple(code for arrow, code in arrow_code.items() if code.startswith("mor:"))
    sorts[inc_sort] = tuple(code for arrow, code in arrow_code.items() if code.startswith("inc:"))
    base_sorts.extend([elt_sort, ob_sort, mor_sort, inc_sort])
    relations.update(
        {
            f"{prefix}elt_of": Relation((elt_sort, ob_sort), frozenset(elt_of)),
            f"{prefix}over": Relation((ob_sort, point_sort), frozenset(over)),
            f"{prefix}mor_ends": Relation((mor_sort, ob_sort, ob_sort), frozenset(mor_ends)),
            f"{prefix}mor_graph": Relation((mor_sort, elt_sort, elt_sort), frozenset(mor_graph)),
            f"{prefix}inc_ends": Relation((inc_sort, ob_sort, ob_sort), frozenset(inc_ends)),
            f"{prefix}inc_graph": Relation((inc_sort, elt_sort, elt_sort), frozenset(inc_graph)),
        }
    )
    structure = MultiSortedStructure(sorts, relations, tuple(base_sorts))
    return UniverseEncoding(structure, groupoid, prefix, element_code, object_code, arrow_code, point_sort)


def encode_many(
    groupoids: Sequence[tuple[SimplicialGroupoid, str]], base: MultiSortedStructure | None = None
) -> list[UniverseEncoding]:
    """Encode several groupoids into one universe; every encoding carries the final shared structure."""
    encodings = []
    current = base
    for groupoid, prefix in groupoids:
        encoding = encode_simplicial(groupoid, current, prefix)
        encodings.append(encoding)
        current = encoding.structure
    return [replace(encoding, structure=current) for encoding in encodings]


def base_part(structure: MultiSortedStructure) -> MultiSortedStructure:
    """The reduct to the base sorts and the relations living on them."""
    sorts = {s: structure.sorts[s] for s in structure.sorts if s in structure.base_sorts}
    relations = {
        name: r for name, r in structure.relations.items() if all(s in structure.base_sorts for s in r.signature)
    }
    return MultiSortedStructure(sorts, relations, structure.base_sorts)


def expand_base(structure: MultiSortedStructure, base: MultiSortedStructure) -> MultiSortedStructure:
    """`structure` with its base replaced by the larger universe `base` (which must contain the old base)."""
    sorts = dict(base.sorts)
    for sort, elements in structure.sorts.items():
        if sort not in structure.base_sorts:
            sorts[sort] = elements
    relations = dict(base.relations)
    for name, relation in structure.relations.items():
        if not all(s in structure.base_sorts for s in relation.signature):
            relations[name] = relation
    return MultiSortedStructure(sorts, relations, base.base_sorts, structure.fiber_map, dict(structure.supports))
