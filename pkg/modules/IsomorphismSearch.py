"""
Backtracking search for isomorphisms between finite multi-sorted structures.

The matcher refines an initial colouring of both structures with a shared
palette (sort, pinned elements, setwise constraints), so candidate domains
start as colour classes. Assignments are propagated by forward checking:
once a relation tuple has one unassigned element left, that element's domain
shrinks to the values completing the tuple in the target.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from typing import Iterable, Iterator, Mapping

from modules.ElementMap import ElementMap
from modules.Errors import UnknownIdentifierError
from modules.MultiSortedStructure import MultiSortedStructure

logger = logging.getLogger(__name__)


class IsomorphismSearch:
    """
    Enumerate isomorphisms `source` -> `target` that send every element to an
    element of the same sort, pin `fixed_elements`, map each set in `setwise`
    onto itself and extend the partial map `assignments`.
    """

    def __init__(
        self,
        source: MultiSortedStructure,
        target: MultiSortedStructure,
        fixed_elements: Iterable[str] = (),
        setwise: Iterable[Iterable[str]] = (),
        assignments: Mapping[str, str] | None = None,
        limit: int | None = None,
    ):
        self.source = source
        self.target = target
        self.fixed = frozenset(fixed_elements)
        self.setwise = [frozenset(s) for s in setwise]
        self.assignments = dict(assignments or {})
        self.limit = limit
        self.nodes = 0
        for x in self.fixed:
            source.require_element(x)
        for x, y in self.assignments.items():
            source.require_element(x)
            target.require_element(y)

    # Colour refinement

    def _initial_colour(self, structure: MultiSortedStructure, x: str, pinned: Mapping[str, str]) -> tuple:
        bits = tuple(x in s for s in self.setwise)
        return (structure.sort_of[x], pinned.get(x, ""), bits)

    def _refine(self) -> tuple[dict[str, int], dict[str, int]] | None:
        pinned_source = {x: f"fix:{x}" for x in self.fixed}
        pinned_target = {x: f"fix:{x}" for x in self.fixed}
        for x, y in self.assignments.items():
            pinned_source[x] = f"set:{x}"
            pinned_target[y] = f"set:{x}"
        palette: dict[tuple, int] = {}

        def paint(value: tuple) -> int:
            return palette.setdefault(value, len(palette))

        source_colours = {x: paint(self._initial_colour(self.source, x, pinned_source)) for x in self.source.elements}
        target_colours = {y: paint(self._initial_colour(self.target, y, pinned_target)) for y in self.target.elements}
        classes = -1
        while True:
            if sorted(source_colours.values()) != sorted(target_colours.values()):
                return None
            count = len(set(source_colours.values()))
            if count == classes:
                return source_colours, target_colours
            classes = count
            palette = {}
            source_colours = self._refine_round(self.source, source_colours, paint_with=palette)
            target_colours = self._refine_round(self.target, target_colours, paint_with=palette)

    @staticmethod
    def _refine_round(structure: MultiSortedStructure, colours: Mapping[str, int], paint_with: dict) -> dict[str, int]:
        refined = {}
        for x in structure.elements:
            neighbourhood = []
            for name, t in structure.tuples_by_element.get(x, ()):
                for position, y in enumerate(t):
                    if y == x:
                        neighbourhood.append((name, position, tuple(colours[z] for z in t)))
            signature = (colours[x], tuple(sorted(neighbourhood)))
            refined[x] = paint_with.setdefault(signature, len(paint_with))
        return refined

    # Search

    def isomorphisms_iter(self) -> Iterator[ElementMap]:
        if self.source.sorts.keys() != self.target.sorts.keys():
            return
        for sort in self.source.sorts:
            if len(self.source.sorts[sort]) != len(self.target.sorts[sort]):
                return
        source_relations, target_relations = self.source.all_relations, self.target.all_relations
        if source_relations.keys() != target_relations.keys():
            return
        for name, relation in source_relations.items():
            if len(relation.tuples) != len(target_relations[name].tuples):
                return
        for x in self.fixed:
            if x not in self.target.sort_of:
                return
        refined = self._refine()
        if refined is None:
            return
        source_colours, target_colours = refined
        by_colour: dict[int, list[str]] = defaultdict(list)
        for y in self.target.elements:
            by_colour[target_colours[y]].append(y)
        domains = {x: set(by_colour[source_colours[x]]) for x in self.source.elements}
        order = self.source.element_index
        target_index = self.target.element_index
        assignment: dict[str, str] = {}
        used: set[str] = set()
        found = 0

        def propagate(x: str, changed: list[tuple[str, set[str]]]) -> bool:
            for name, t in self.source.tuples_by_element.get(x, ()):
                open_elements = {z for z in t if z not in assignment}
                if not open_elements:
                    if tuple(assignment[z] for z in t) not in target_relations[name].tuples:
                        return False
                elif len(open_elements) == 1:
                    z = next(iter(open_elements))
                    allowed = {
                        v
                        for v in domains[z]
                        if tuple(v if w == z else assignment[w] for w in t) in target_relations[name].tuples
                    }
                    if allowed != domains[z]:
                        changed.append((z, domains[z]))
                        domains[z] = allowed
                        if not allowed:
                            return False
            return True

        def search() -> Iterator[ElementMap]:
            nonlocal found
            open_elements = [x for x in self.source.elements if x not in assignment]
            if not open_elements:
                found += 1
                yield ElementMap.from_dict(assignment)
                return
            x = min(open_elements, key=lambda e: (len(domains[e] - used), order[e]))
            for y in sorted(domains[x] - used, key=target_index.__getitem__):
                self.nodes += 1
                assignment[x] = y
                used.add(y)
                changed: list[tuple[str, set[str]]] = []
                if propagate(x, changed):
                    yield from search()
                for z, previous in reversed(changed):
                    domains[z] = previous
                used.discard(y)
                del assignment[x]
                if self.limit is not None and found >= self.limit:
                    return

        yield from search()
        logger.debug("Isomorphism search visited %d nodes, found %d", self.nodes, found)

    def first(self) -> ElementMap | None:
        return next(self.isomorphisms_iter(), None)

    def all(self) -> list[ElementMap]:
        return sorted(self.isomorphisms_iter(), key=lambda m: m.signature)


def automorphism_group(
    structure: MultiSortedStructure,
    fixed_sorts: Iterable[str] = (),
    fixed_elements: Iterable[str] = (),
    setwise: Iterable[Iterable[str]] = (),
    assignments: Mapping[str, str] | None = None,
    limit: int | None = None,
) -> list[ElementMap]:
    """Relation-preserving permutations satisfying the constraints, sorted by signature."""
    pinned = set(fixed_elements)
    for sort in fixed_sorts:
        structure.require_sort(sort)
        pinned.update(structure.sorts[sort])
    return IsomorphismSearch(structure, structure, pinned, setwise, assignments, limit).all()


def find_isomorphism(
    source: MultiSortedStructure, target: MultiSortedStructure, fix_base: bool = True
) -> ElementMap | None:
    """An isomorphism, fixing the base elements pointwise when `fix_base` is set."""
    fixed = source.base_elements if fix_base else ()
    if fix_base and source.base_elements != target.base_elements:
        return None
    return IsomorphismSearch(source, target, fixed_elements=fixed, limit=1).first()


def is_group(elements: list[ElementMap]) -> bool:
    members = set(elements)
    if not members:
        return False
    domain = next(iter(members)).domain
    if ElementMap.identity(domain) not in members:
        return False
    return all(g.inverse() in members and all(g.after(h) in members for h in members) for g in members)
