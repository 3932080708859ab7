"""
Restrictions, stable embeddedness and the local/global automorphism check.

Definability with parameters b̄ is approximated by invariance: a set of
tuples counts as b̄-definable when it is a union of orbits of Aut(M/b̄).
Restricted structures therefore carry, besides the restricted named
relations, one relation per orbit of tuples up to `orbit_arity`.
"""

from __future__ import annotations

import logging
from itertools import permutations
from typing import Iterable

from modules.ElementMap import ElementMap
from modules.Errors import InvariantBreachError, PreconditionError, UnknownIdentifierError
from modules.IsomorphismSearch import IsomorphismSearch, automorphism_group, find_isomorphism
from modules.MultiSortedStructure import FiberMap, MultiSortedStructure, Relation
from modules.SimplicialGroupoid import nonempty_subsets
from modules.ValidationReport import CheckResult

logger = logging.getLogger(__name__)


class StructureAnalyzer:
    def __init__(self, orbit_arity: int = 2):
        if orbit_arity < 1:
            raise PreconditionError("orbit arity must be at least 1")
        self.orbit_arity = orbit_arity
        self._group_cache: dict[frozenset[str], tuple[MultiSortedStructure, list[ElementMap]]] = {}

    def restrict_structure(
        self,
        structure: MultiSortedStructure,
        sorts: Iterable[str] | None = None,
        parameters: Iterable[str] = (),
        fiber_subset: Iterable[str] | None = None,
        fix_base: bool = False,
        orbit_sorts: Iterable[str] | None = None,
    ) -> MultiSortedStructure:
        """
        The structure induced on the chosen sorts. With `fiber_subset` the
        fiber sort shrinks to S_c̄ and auxiliary elements to those supported
        inside c̄. With `fix_base` the orbit relations are taken over 𝕌.
        `orbit_sorts` limits orbit relations to tuples drawn from those sorts.
        """
        kept_sorts = list(structure.sorts) if sorts is None else list(sorts)
        for sort in kept_sorts:
            structure.require_sort(sort)
        missing = [s for s in structure.base_sorts if s not in kept_sorts]
        if missing:
            raise PreconditionError(f"Restriction must keep the base sorts, '{missing[0]}' is dropped")
        parameters = list(parameters)
        for p in parameters:
            structure.require_element(p)
        subset = None if fiber_subset is None else frozenset(fiber_subset)
        fiber = structure.fiber_map
        if subset is not None:
            if fiber is None:
                raise PreconditionError("Fiber restriction needs a fiber map")
            for point in subset:
                if point not in fiber.base_set:
                    raise UnknownIdentifierError(point, "base point")

        ordered_sorts = [s for s in structure.sorts if s in kept_sorts]
        sorts_out = {}
        for sort in ordered_sorts:
            elements = structure.sorts[sort]
            if subset is not None and sort not in structure.base_sorts:
                if fiber is not None and sort == fiber.fiber_sort:
                    elements = tuple(x for x in elements if fiber.assignment(x) in subset)
                else:
                    elements = tuple(x for x in elements if structure.supports.get(x, frozenset()) <= subset and x in structure.supports)
            sorts_out[sort] = elements
        universe = frozenset(x for xs in sorts_out.values() for x in xs)

        relations = {name: r.restrict(universe) for name, r in structure.relations.items() if all(s in sorts_out for s in r.signature)}
        fiber_out = None
        if fiber is not None and fiber.fiber_sort in sorts_out:
            assignment = fiber.assignment.restrict(universe)
            fiber_out = FiberMap(fiber.fiber_sort, tuple(sorted(assignment.image)), assignment)
            for p in parameters:
                if p in fiber.base_set:
                    members = [x for x in sorts_out[fiber.fiber_sort] if fiber.assignment(x) == p]
                    relations[f"fiber[{p}]"] = Relation.of((fiber.fiber_sort,), [(x,) for x in members])

        fixed = frozenset(parameters) | (structure.base_elements if fix_base else frozenset())
        group = [g for g in self._fixing_group(structure, fixed) if all(g(x) in universe for x in universe)]
        orbit_universe = [x for x in structure.elements if x in universe]
        if orbit_sorts is not None:
            wanted = set(orbit_sorts)
            orbit_universe = [x for x in orbit_universe if structure.sort_of[x] in wanted]
        relations.update(self._orbit_relations(structure, group, orbit_universe))
        supports = {x: s for x, s in structure.supports.items() if x in universe}
        return MultiSortedStructure(sorts_out, relations, structure.base_sorts, fiber_out, supports)

    def _fixing_group(self, structure: MultiSortedStructure, fixed: frozenset[str]) -> list[ElementMap]:
        """Aut(M / fixed), remembered for the last structure asked about."""
        cached = self._group_cache.get(fixed)
        if cached is not None and cached[0] is structure:
            return cached[1]
        group = automorphism_group(structure, fixed_elements=fixed)
        if self._group_cache and next(iter(self._group_cache.values()))[0] is not structure:
            self._group_cache.clear()
        self._group_cache[fixed] = (structure, group)
        return group

    def _orbit_relations(self, structure: MultiSortedStructure, group: list[ElementMap], universe: list[str]) -> dict[str, Relation]:
        # A tuple with a fixed coordinate has orbit {r} x orbit(rest), already
        # definable from lower arities, so only fully moving tuples are named.
        relations = {}
        rigid = {x for x in universe if all(g(x) == x for g in group)}
        for arity in range(1, self.orbit_arity + 1):
            seen: set[tuple[str, ...]] = set()
            index = 0
            candidates = universe if arity == 1 else [x for x in universe if x not in rigid]
            for t in permutations(candidates, arity):
                if t in seen:
                    continue
                orbit = {tuple(g(x) for x in t) for g in group}
                seen |= orbit
                signature = tuple(structure.sort_of[x] for x in t)
                relations[f"orbit{arity}_{index}"] = Relation(signature, frozenset(orbit))
                index += 1
        return relations

    def check_stable_embedding(
        self, structure: MultiSortedStructure, sub: MultiSortedStructure, fix_base: bool = False
    ) -> CheckResult:
        """Every automorphism of `sub` (fixing its base when asked) lifts to `structure`."""
        for x in sub.elements:
            structure.require_element(x)
        fixed = sub.base_elements if fix_base else ()
        automorphisms = automorphism_group(sub, fixed_elements=fixed)
        for sigma in automorphisms:
            lift = IsomorphismSearch(structure, structure, assignments=sigma.as_dict, limit=1).first()
            if lift is None:
                moved = {x: y for x, y in sigma.pairs if x != y}
                return CheckResult(False, {"automorphism": sigma.signature, "moved": moved})
        return CheckResult(True, None, {"automorphisms": len(automorphisms)})

    def local_global_check(self, structure: MultiSortedStructure, tau: ElementMap) -> CheckResult:
        """
        τ ∪ id_𝕌 is an automorphism iff its restriction to every (𝕌, S_c̄) is.
        Both sides are computed; a disagreement raises.
        """
        fiber = structure.fiber_map
        if fiber is None:
            raise PreconditionError("local/global check needs a fiber map")
        moved_sorts = [s for s in structure.sorts if s not in structure.base_sorts]
        expected = frozenset(x for s in moved_sorts for x in structure.sorts[s])
        if tau.domain != expected or tau.image != expected:
            raise PreconditionError("τ must permute exactly the non-base elements")
        for x in structure.sorts[fiber.fiber_sort]:
            if fiber.assignment(tau(x)) != fiber.assignment(x):
                raise PreconditionError(f"τ moves '{x}' to another fiber")
        mapping = tau.union(ElementMap.identity(structure.base_elements))
        broken = structure.first_broken_tuple(mapping)
        holds = broken is None

        local_holds = True
        checked = 0
        for subset in nonempty_subsets(fiber.base_set, len(fiber.base_set)):
            points = frozenset(subset)
            universe = frozenset(structure.base_elements) | {
                x for x in expected if (fiber.assignment.get(x) in points) or (x in structure.supports and structure.supports[x] <= points)
            }
            local = MultiSortedStructure(
                {s: tuple(x for x in xs if x in universe) for s, xs in structure.sorts.items()},
                {name: r.restrict(universe) for name, r in structure.relations.items()},
                structure.base_sorts,
            )
            checked += 1
            if local.first_broken_tuple(mapping.restrict(universe)) is not None:
                local_holds = False
                break
        if holds != local_holds:
            raise InvariantBreachError(f"local check says {local_holds}, global check says {holds}")
        counterexample = None if holds else {"relation": broken[0], "tuple": list(broken[1])}
        return CheckResult(holds, counterexample, {"subsets_checked": checked})

    def find_isomorphism(self, source: MultiSortedStructure, target: MultiSortedStructure, fix_base: bool = True):
        return find_isomorphism(source, target, fix_base)
