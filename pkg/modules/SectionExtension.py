"""
Extending maps and sections along 1 → K → S → C → 0.

C is modelled as ℤ^m (ℚ^m for sections) and K as ℤ^d ⊕ finite cyclic
torsion. A map from finitely many elements b_i of C into K extends to a
morphism on ⟨b̄⟩ exactly when it kills the relation lattice of b̄. A section
on a finitely generated G ⊂ ℚ^m extends to the ℚ-span through a coherent
system of roots h_{i,1/n}. A root is an exact exponent vector over the
generators together with a twist in ℚ/ℤ naming the root of unity of K it
carries; the laws are checked on these elements, so a system whose twists
break (h_{i,1/kl})^k = h_{i,1/l} is caught.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping, Sequence

from sympy import Integer, Matrix, Rational, sympify

from modules.Errors import PreconditionError
from modules.RelationLattice import RelationLattice, Vector, as_vector
from modules.ValidationReport import CheckResult

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AbelianPresentation:
    """
    C ≅ ℤ^rank and K ≅ ℤ^free_rank ⊕ ⊕ ℤ/t for t in torsion.
    K elements are integer tuples: free coordinates first, then torsion coordinates.
    """

    rank: int
    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 0 or self.free_rank < 0:
            raise PreconditionError("Ranks must be non-negative")
        if any(t < 1 for t in self.torsion):
            raise PreconditionError(f"Torsion orders must be positive, got {self.torsion}")

    @classmethod
    def cyclic(cls, rank: int, order: int) -> AbelianPresentation:
        return cls(rank, 0, (order,))

    @property
    def width(self) -> int:
        return self.free_rank + len(self.torsion)

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def order(self) -> int | None:
        if not self.is_finite:
            return None
        total = 1
        for t in self.torsion:
            total *= t
        return total

    @property
    def zero(self) -> Vector:
        return (0,) * self.width

    def normalize(self, x: int | Iterable[int]) -> Vector:
        vector = as_vector(x)
        if len(vector) != self.width:
            raise PreconditionError(f"Expected a K element with {self.width} coordinates, got {vector}")
        free = vector[: self.free_rank]
        torsion = tuple(v % t for v, t in zip(vector[self.free_rank :], self.torsion))
        return free + torsion

    def add(self, x: Sequence[int], y: Sequence[int]) -> Vector:
        return self.normalize(tuple(a + b for a, b in zip(x, y)))

    def scale(self, n: int, x: Sequence[int]) -> Vector:
        return self.normalize(tuple(n * a for a in x))

    def combine(self, coefficients: Sequence[int], values: Sequence[Sequence[int]]) -> Vector:
        total = self.zero
        for n, value in zip(coefficients, values):
            total = self.add(total, self.scale(n, value))
        return total

    def elements(self) -> list[Vector]:
        if not self.is_finite:
            raise PreconditionError("K is infinite")
        return list(product(*(range(t) for t in self.torsion)))

    def check_base_element(self, c: int | Iterable[int]) -> Vector:
        vector = as_vector(c)
        if len(vector) != self.rank:
            raise PreconditionError(f"Expected an element of ℤ^{self.rank}, got {vector}")
        return vector


@dataclass(frozen=True)
class ExtensionCheck:
    """Outcome of morphism_extension_check; `evaluate` is the extension on ⟨b̄⟩ when it exists."""

    presentation: AbelianPresentation
    lattice: RelationLattice
    values: tuple[Vector, ...]
    extends: bool
    violated: Vector | None = None

    def evaluate(self, element: int | Iterable[int]) -> Vector:
        if not self.extends:
            raise PreconditionError(f"The map does not extend: relation {self.violated} is not killed")
        coefficients = self.lattice.solve(self.presentation.check_base_element(element))
        if coefficients is None:
            raise PreconditionError(f"{as_vector(element)} is not in the subgroup generated by the b_i")
        return self.presentation.combine(coefficients, self.values)

    def to_dict(self) -> dict:
        return {
            "extends": self.extends,
            "violated": None if self.violated is None else list(self.violated),
            "lattice": self.lattice.to_dict(),
        }


def morphism_extension_check(
    presentation: AbelianPresentation,
    elements: Sequence[int | Iterable[int]],
    values: Sequence[int | Iterable[int]],
) -> ExtensionCheck:
    """Does b_i ↦ f(b_i) extend to a morphism ⟨b̄⟩ → K? It does iff Σ n_i f(b_i) = 0 for every relation n̄."""
    if len(elements) != len(values):
        raise PreconditionError("Need one value per element")
    base = [presentation.check_base_element(b) for b in elements]
    images = tuple(presentation.normalize(v) for v in values)
    lattice = RelationLattice.of(base) if base else RelationLattice((), ())
    for relation in lattice.hermite:
        if presentation.combine(relation, images) != presentation.zero:
            logger.debug("Relation %s is not killed", relation)
            return ExtensionCheck(presentation, lattice, images, False, relation)
    return ExtensionCheck(presentation, lattice, images, True)


# Sections


def _rational(value) -> Rational:
    if isinstance(value, Fraction):
        return Rational(value.numerator, value.denominator)
    return Rational(sympify(value))


def _rational_vector(values: int | Iterable) -> tuple[Rational, ...]:
    if not isinstance(values, (list, tuple)):
        values = (values,)
    return tuple(_rational(v) for v in values)


@dataclass(frozen=True)
class RootElement:
    """Π h_i^{e_i} · ζ in S, where ζ = exp(2πi·twist) lies in the torsion of K."""

    exponents: tuple[Rational, ...]
    twist: Rational = Integer(0)

    def __post_init__(self):
        object.__setattr__(self, "twist", Rational(self.twist) % 1)

    @classmethod
    def identity(cls, size: int) -> RootElement:
        return cls((Integer(0),) * size)

    def __mul__(self, other: RootElement) -> RootElement:
        return RootElement(tuple(a + b for a, b in zip(self.exponents, other.exponents)), self.twist + other.twist)

    def __pow__(self, n: int) -> RootElement:
        return RootElement(tuple(n * e for e in self.exponents), n * self.twist)


@dataclass(frozen=True)
class ExtendedSection:
    """
    s on the ℚ-span of g_1, …, g_r: s(Σ (a_i/b_i) g_i) = Π h_{i,1/b_i}^{a_i}.
    `twists[(i, n)]` places h_{i,1/n} among the n-th roots of s(g_i); the
    default system of roots has no twists and is coherent.
    """

    presentation: AbelianPresentation
    generators: tuple[tuple[Rational, ...], ...]
    values: tuple[SectionValue, ...]
    twists: Mapping[tuple[int, int], Rational] = field(default_factory=dict)

    @cached_property
    def _matrix(self) -> Matrix:
        return Matrix.hstack(*(Matrix(g) for g in self.generators))

    def coordinates(self, x) -> tuple[Rational, ...]:
        """q̄ with x = Σ q_i g_i."""
        target = Matrix(_rational_vector(x))
        if target.rows != self.presentation.rank:
            raise PreconditionError(f"Expected an element of ℚ^{self.presentation.rank}")
        try:
            solution, params = self._matrix.gauss_jordan_solve(target)
        except ValueError:
            raise PreconditionError(f"{tuple(target)} is not in the ℚ-span of the generators") from None
        if params.shape[0]:
            raise PreconditionError("Generators are not independent")
        return tuple(Rational(v) for v in solution)

    def root(self, index: int, n: int) -> RootElement:
        """h_{i,1/n}, an n-th root of s(g_i)."""
        if n < 1:
            raise PreconditionError("Root index must be positive")
        exponents = tuple(Rational(1, n) if i == index else Integer(0) for i in range(len(self.values)))
        return RootElement(exponents, self.twists.get((index, n), Integer(0)))

    def evaluate(self, coordinates: Sequence) -> RootElement:
        """Π h_{i,1/b_i}^{a_i} for coordinates a_i/b_i."""
        result = RootElement.identity(len(self.values))
        for index, q in enumerate(coordinates):
            q = _rational(q)
            result = result * self.root(index, int(q.q)) ** int(q.p)
        return result

    def __call__(self, x) -> RootElement:
        return self.evaluate(self.coordinates(x))

    def project(self, value: RootElement) -> tuple[Rational, ...]:
        """π: the exponent of h_i contributes that multiple of g_i; the twist lies in K."""
        return _combine_rational(self.generators, value.exponents, self.presentation.rank)

    def root_form(self, value: RootElement) -> dict[str, tuple[int, int]]:
        """{name: (n, a)} reading value as Π h_{i,1/n}^a in lowest terms."""
        return {
            section.name: (int(e.q), int(e.p))
            for section, e in zip(self.values, value.exponents)
            if e != 0
        }

    def check_laws(self, samples: Iterable[tuple[Sequence, Sequence]]) -> CheckResult:
        """
        On coordinate pairs (x, y): s(x+y) = s(x)·s(y), π(s(x)) = x, and
        s(ka/kb) = s(a/b) through the chosen roots.
        """
        count = 0
        for x, y in samples:
            x = tuple(_rational(q) for q in x)
            y = tuple(_rational(q) for q in y)
            total = tuple(a + b for a, b in zip(x, y))
            if self.evaluate(total) != self.evaluate(x) * self.evaluate(y):
                return CheckResult(False, {"law": "morphism", "x": _strs(x), "y": _strs(y)})
            point = _combine_rational(self.generators, x, self.presentation.rank)
            if self.project(self.evaluate(x)) != point:
                return CheckResult(False, {"law": "section", "x": _strs(x)})
            for index, q in enumerate(x):
                for k in (2, 3):
                    expanded = self.root(index, k * int(q.q)) ** (k * int(q.p))
                    if expanded != self.root(index, int(q.q)) ** int(q.p):
                        return CheckResult(False, {"law": "well-defined", "x": _strs(x), "factor": k})
            count += 1
        return CheckResult(True, None, {"samples": count})

    def to_dict(self) -> dict:
        return {
            "generators": [_strs(g) for g in self.generators],
            "values": [v.name for v in self.values],
            "twists": {f"{i}/{n}": str(t) for (i, n), t in sorted(self.twists.items())},
        }


def _strs(values: Iterable) -> list[str]:
    return [str(v) for v in values]


def _combine_rational(generators, coefficients, rank: int) -> tuple[Rational, ...]:
    return tuple(
        sum((q * g[row] for q, g in zip(coefficients, generators)), Integer(0)) for row in range(rank)
    )


def extend_section(
    presentation: AbelianPresentation,
    generators: Sequence,
    values: Sequence[SectionValue],
    twists: Mapping[tuple[int, int], object] | None = None,
) -> ExtendedSection:
    """Extend a section given on a ℤ-basis g_i of G ⊂ ℚ^m to the ℚ-span of G."""
    if len(generators) != len(values):
        raise PreconditionError("Need one section value per generator")
    basis = tuple(_rational_vector(g) for g in generators)
    for g in basis:
        if len(g) != presentation.rank:
            raise PreconditionError(f"Generator {_strs(g)} is not in ℚ^{presentation.rank}")
    for g, value in zip(basis, values):
        if value.projection != g:
            raise PreconditionError(
                f"s is not a section: π({value.name}) = {_strs(value.projection)} differs from {_strs(g)}"
            )
    if basis and Matrix.hstack(*(Matrix(g) for g in basis)).rank() < len(basis):
        raise PreconditionError("Generators are not a ℤ-basis: they are linearly dependent")
    roots = {}
    for (index, n), twist in (twists or {}).items():
        twist = _rational(twist)
        if not 0 <= index < len(values) or n < 1:
            raise PreconditionError(f"No root h_{{{index},1/{n}}}")
        if not (n * twist).is_integer:
            raise PreconditionError(f"Twist {twist} does not give an {n}-th root of {values[index].name}")
        roots[(index, n)] = twist % 1
    logger.debug("Extending a section over %d generators", len(basis))
    return ExtendedSection(presentation, basis, tuple(values), roots)
