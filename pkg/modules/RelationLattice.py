"""
Integer relation lattices of finitely many elements of ℤ^m.

The relation lattice of c̄ = (c₁, …, c_n) is {k ∈ ℤⁿ : Σ k_i c_i = 0}. Kernels
come from the Smith decomposition D = S·M·T of the m×n matrix with columns
c_i: the columns of T past the rank span the kernel. Lattices are compared
through their Hermite normal forms.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, Sequence

from sympy.polys.domains import ZZ
from sympy.polys.matrices import DM
from sympy.polys.matrices.normalforms import hermite_normal_form, smith_normal_decomp

from modules.Errors import PreconditionError

logger = logging.getLogger(__name__)

Vector = tuple[int, ...]


def as_vector(value: int | Iterable[int]) -> Vector:
    """Integers stand for vectors of ℤ¹."""
    if isinstance(value, int):
        return (value,)
    return tuple(int(v) for v in value)


def _columns(vectors: Sequence[Vector], height: int):
    return DM([[vector[row] for vector in vectors] for row in range(height)], ZZ)


def _entries(matrix) -> list[list[int]]:
    return [[int(x) for x in row] for row in matrix.to_list()]


def _smith(vectors: Sequence[Vector], height: int) -> tuple[list[int], list[list[int]], list[list[int]]]:
    """Diagonal of D, and S, T with D = S·M·T for M the matrix with the given columns."""
    diagonal, left, right = smith_normal_decomp(_columns(vectors, height))
    entries = _entries(diagonal)
    return [entries[i][i] for i in range(min(height, len(vectors)))], _entries(left), _entries(right)


def integer_kernel(vectors: Sequence[Vector], height: int) -> tuple[Vector, ...]:
    """A ℤ-basis of {k : Σ k_i v_i = 0}."""
    width = len(vectors)
    if width == 0:
        return ()
    if height == 0:
        return tuple(tuple(int(i == j) for i in range(width)) for j in range(width))
    diagonal, _, right = _smith(vectors, height)
    rank = sum(1 for d in diagonal if d != 0)
    return tuple(tuple(right[i][j] for i in range(width)) for j in range(rank, width))


def integer_solve(vectors: Sequence[Vector], target: Vector) -> Vector | None:
    """Integers y with Σ y_i v_i = target, or None when target is outside the span."""
    height = len(target)
    width = len(vectors)
    if width == 0 or height == 0:
        return () if not any(target) else None
    diagonal, left, right = _smith(vectors, height)
    moved = [sum(left[i][j] * target[j] for j in range(height)) for i in range(height)]
    z = [0] * width
    for i, value in enumerate(moved):
        d = diagonal[i] if i < len(diagonal) else 0
        if d == 0:
            if value != 0:
                return None
        elif value % d:
            return None
        else:
            z[i] = value // d
    return tuple(sum(right[i][j] * z[j] for j in range(width)) for i in range(width))


def hermite_basis(vectors: Sequence[Vector], height: int) -> tuple[Vector, ...]:
    """The Hermite normal form of the lattice spanned by the vectors, as columns; zero columns dropped."""
    nonzero = [v for v in vectors if any(v)]
    if not nonzero or height == 0:
        return ()
    entries = _entries(hermite_normal_form(_columns(nonzero, height)))
    width = len(entries[0]) if entries else 0
    columns = (tuple(entries[i][j] for i in range(height)) for j in range(width))
    return tuple(column for column in columns if any(column))


def _combine(vectors: Sequence[Vector], coefficients: Sequence[int]) -> Vector:
    return tuple(sum(k * v[i] for k, v in zip(coefficients, vectors)) for i in range(len(vectors[0])))


@dataclass(frozen=True)
class RelationLattice:
    """
    A sublattice of the relations among `generators`.

    Attributes:
        generators: c̄, elements of ℤ^m
        basis: integral vectors of ℤⁿ spanning the lattice
    """

    generators: tuple[Vector, ...]
    basis: tuple[Vector, ...]

    @classmethod
    def of(cls, generators: Iterable[int | Iterable[int]]) -> RelationLattice:
        vectors = tuple(as_vector(c) for c in generators)
        if len({len(v) for v in vectors}) > 1:
            raise PreconditionError("Generators must all lie in the same ℤ^m")
        height = len(vectors[0]) if vectors else 0
        return cls(vectors, integer_kernel(vectors, height))

    @property
    def length(self) -> int:
        return len(self.generators)

    @property
    def ambient_rank(self) -> int:
        return len(self.generators[0]) if self.generators else 0

    @cached_property
    def hermite(self) -> tuple[Vector, ...]:
        return hermite_basis(self.basis, self.length)

    @property
    def rank(self) -> int:
        return len(self.hermite)

    def is_relation(self, k: Sequence[int]) -> bool:
        return not any(_combine(self.generators, k)) if self.generators else True

    def contains(self, k: Iterable[int]) -> bool:
        vector = as_vector(k)
        if len(vector) != self.length:
            raise PreconditionError(f"Expected a vector of length {self.length}")
        return integer_solve(self.basis, vector) is not None

    def solve(self, element: int | Iterable[int]) -> Vector | None:
        """Integer coefficients n_i with Σ n_i c_i = element, if element lies in ⟨c̄⟩."""
        vector = as_vector(element)
        if len(vector) != self.ambient_rank:
            raise PreconditionError(f"Expected an element of ℤ^{self.ambient_rank}")
        return integer_solve(self.generators, vector)

    def is_sublattice_of(self, other: RelationLattice) -> bool:
        return all(other.contains(k) for k in self.basis)

    def same_lattice(self, other: RelationLattice) -> bool:
        return self.length == other.length and self.hermite == other.hermite

    def to_dict(self) -> dict:
        return {
            "generators": [list(c) for c in self.generators],
            "basis": [list(k) for k in self.hermite],
            "rank": self.rank,
        }


@dataclass(frozen=True)
class TranslationWitness:
    """
    Fiberwise translation x ∈ Kⁿ, with K = ℤ (modulus None) or ℤ/modulus,
    satisfying every bounded relation and breaking `broken` from the full lattice.
    """

    modulus: int | None
    shifts: Vector
    broken: Vector

    def to_dict(self) -> dict:
        return {"modulus": self.modulus, "shifts": list(self.shifts), "broken": list(self.broken)}


@dataclass(frozen=True)
class BoundedRelations:
    bound: int
    lattice: RelationLattice
    full: RelationLattice
    strict: bool
    witness: TranslationWitness | None = None

    def to_dict(self) -> dict:
        return {
            "bound": self.bound,
            "lattice": self.lattice.to_dict(),
            "full": self.full.to_dict(),
            "strict": self.strict,
            "witness": None if self.witness is None else self.witness.to_dict(),
        }


def _pair(k: Sequence[int], x: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(k, x))


def _orthogonal(basis: Sequence[Vector], n: int) -> tuple[Vector, ...]:
    """A ℤ-basis of {x ∈ ℤⁿ : k·x = 0 for every k in basis}."""
    if not basis:
        return _units(n)
    return integer_kernel([tuple(k[j] for k in basis) for j in range(n)], len(basis))


def _integer_witness(bounded: RelationLattice, full: RelationLattice) -> TranslationWitness | None:
    for x in _orthogonal(bounded.basis, bounded.length):
        for k in full.hermite:
            if _pair(k, x):
                return TranslationWitness(None, x, k)
    return None


def _units(n: int) -> tuple[Vector, ...]:
    return tuple(tuple(int(i == j) for i in range(n)) for j in range(n))


def _cyclic_witness(bounded: RelationLattice, full: RelationLattice, max_modulus: int) -> TranslationWitness | None:
    n = bounded.length
    for q in range(2, max_modulus + 1):
        for x in product(range(q), repeat=n):
            if any(_pair(k, x) % q for k in bounded.basis):
                continue
            broken = next((k for k in full.hermite if _pair(k, x) % q), None)
            if broken is not None:
                return TranslationWitness(q, x, broken)
    return None


def bounded_relation_lattice(generators: Iterable[int | Iterable[int]], bound: int, max_modulus: int = 32) -> BoundedRelations:
    """
    The lattice generated by relations of max-norm ≤ bound, compared with the
    full relation lattice. A strict inclusion comes with a translation witness.
    """
    if bound < 1:
        raise PreconditionError(f"The coefficient bound must be at least 1, got {bound}")
    full = RelationLattice.of(generators)
    n = full.length
    short = [
        k
        for k in product(range(-bound, bound + 1), repeat=n)
        if any(k) and full.is_relation(k)
    ]
    bounded = RelationLattice(full.generators, hermite_basis(short, n))
    strict = not full.is_sublattice_of(bounded)
    witness = None
    if strict:
        if bounded.rank < full.rank:
            witness = _integer_witness(bounded, full)
        else:
            witness = _cyclic_witness(bounded, full, max_modulus)
        if witness is None:
            logger.warning("No translation witness found for bound %d up to modulus %d", bound, max_modulus)
    logger.debug("Bound %d: bounded rank %d, full rank %d, strict=%s", bound, bounded.rank, full.rank, strict)
    return BoundedRelations(bound, bounded, full, strict, witness)
