"""
Finite levels of the canonical groupoid of an exact sequence 1 → K → S → C → 0.

Over a tuple c̄ of distinct elements of C each fiber S_{c_i} is a K-torsor,
modelled as K × {c_i}. At level N the morphisms of the single object over c̄
are the translations x ∈ Kⁿ killing every relation of c̄ with coefficients
bounded by N. Levels are materialized for K = ℤ/q only.
"""

from __future__ import annotations

import logging
from itertools import combinations, product
from typing import Iterable, Sequence

from modules.ConcreteGroupoid import ConcreteGroupoid
from modules.ElementMap import Arrow, ElementMap
from modules.Errors import PreconditionError
from modules.ProjectiveGroupoidSystem import LevelProjection, ProjectiveGroupoidSystem, linear_system
from modules.RelationLattice import Vector, as_vector, bounded_relation_lattice
from modules.SimplicialGroupoid import subset_label

logger = logging.getLogger(__name__)


def point_name(c: Vector) -> str:
    return "c(" + " ".join(str(v) for v in c) + ")"


def element_name(x: int, point: str) -> str:
    return f"{x}@{point}"


def _tuple(generators: Iterable[int | Iterable[int]]) -> tuple[Vector, ...]:
    vectors = tuple(as_vector(c) for c in generators)
    if not vectors:
        raise PreconditionError("Need at least one element of C")
    if len(set(vectors)) != len(vectors):
        raise PreconditionError(f"Elements of the tuple must be distinct, got {[list(c) for c in vectors]}")
    return vectors


def _require_finite(modulus: int | None) -> int:
    if modulus is None or modulus < 1:
        raise PreconditionError("Only finite levels K = ℤ/q with q ≥ 1 can be materialized")
    return modulus


def translation_group(generators: Sequence[Vector], bound: int, modulus: int) -> list[Vector]:
    """x ∈ (ℤ/q)ⁿ with Σ k_i x_i ≡ 0 for every relation k of max-norm ≤ bound."""
    relations = bounded_relation_lattice(generators, bound).lattice.basis
    return [
        x
        for x in product(range(modulus), repeat=len(generators))
        if all(sum(k * v for k, v in zip(relation, x)) % modulus == 0 for relation in relations)
    ]


def canonical_dcf_groupoid(generators: Iterable[int | Iterable[int]], bound: int, modulus: int | None) -> ConcreteGroupoid:
    """One object O[c̄] whose elements are K × {c_i}; morphisms are the allowed translations."""
    vectors = _tuple(generators)
    q = _require_finite(modulus)
    points = [point_name(c) for c in vectors]
    label = subset_label(points)
    name = f"O[{label}]"
    elements = [element_name(x, p) for p in points for x in range(q)]
    arrows = []
    for shift in translation_group(vectors, bound, q):
        mapping = {
            element_name(x, p): element_name((x + s) % q, p) for p, s in zip(points, shift) for x in range(q)
        }
        arrows.append(Arrow(name, name, ElementMap.from_dict(mapping)))
    logger.debug("Level %d over %s: %d translations", bound, label, len(arrows))
    return ConcreteGroupoid(
        objects={name: frozenset(elements)},
        component_of={name: label},
        component_label={label: frozenset(points)},
        morphisms=frozenset(arrows),
    )


def dcf_bound_system(generators: Iterable[int | Iterable[int]], bounds: Iterable[int], modulus: int | None) -> ProjectiveGroupoidSystem:
    """Levels N₁ < N₂ < … over the same object; a larger bound keeps fewer translations."""
    vectors = _tuple(generators)
    ordered = sorted(set(bounds))
    if not ordered:
        raise PreconditionError("Need at least one bound")
    return linear_system((f"N{n}", canonical_dcf_groupoid(vectors, n, modulus)) for n in ordered)


def dcf_coordinate_system(generators: Iterable[int | Iterable[int]], bound: int, modulus: int | None) -> ProjectiveGroupoidSystem:
    """
    Levels indexed by nonempty sub-tuples of c̄, ordered by inclusion. The
    projection to a sub-tuple keeps the fibers over its points.
    """
    vectors = _tuple(generators)
    points = [point_name(c) for c in vectors]
    subsets = [subset for size in range(1, len(vectors) + 1) for subset in combinations(range(len(vectors)), size)]
    levels = {}
    for subset in subsets:
        levels[subset_label(points[i] for i in subset)] = canonical_dcf_groupoid([vectors[i] for i in subset], bound, modulus)
    order = set()
    projections = {}
    for small in subsets:
        for big in subsets:
            if small == big or not set(small) <= set(big):
                continue
            lower = subset_label(points[i] for i in small)
            upper = subset_label(points[i] for i in big)
            kept = {x for xs in levels[lower].objects.values() for x in xs}
            order.add((lower, upper))
            projections[(lower, upper)] = LevelProjection(
                {f"O[{upper}]": f"O[{lower}]"}, ElementMap.identity(kept)
            )
    indices = tuple(subset_label(points[i] for i in subset) for subset in subsets)
    return ProjectiveGroupoidSystem(indices, frozenset(order), levels, projections)
