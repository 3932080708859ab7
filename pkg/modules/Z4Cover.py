"""
The cover 0 -> (Z/2)^n -> (Z/4)^n -> (Z/2)^n -> 0 at finite n.

𝕌 is (Z/2)^n with its addition, S is (Z/4)^n with its addition, and the
graphs of ι(w) = 2w and π(v) = v mod 2 are named. The fiber over u is π⁻¹(u).
Every automorphism over 𝕌 is a translation by x_u ∈ ι(𝕌) on each fiber with
x additive in u, which is why depth 3 determines it and depth 1 does not.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import product

from modules.BindingExtraction import extract_binding_simplicial_groupoid, projective_limit_aut
from modules.ElementMap import ElementMap
from modules.Errors import PreconditionError
from modules.IsomorphismSearch import automorphism_group
from modules.MultiSortedStructure import FiberMap, MultiSortedStructure, Relation
from modules.StructureAnalyzer import StructureAnalyzer
from modules.ValidationReport import CheckResult

logger = logging.getLogger(__name__)

BASE_SORT = "U"
FIBER_SORT = "S"


def _name(prefix: str, vector: tuple[int, ...]) -> str:
    return prefix + "".join(str(v) for v in vector)


def _vector(name: str) -> tuple[int, ...]:
    return tuple(int(c) for c in name.lstrip("'")[1:])


@dataclass(frozen=True)
class Z4Cover:
    n: int
    structure: MultiSortedStructure

    @cached_property
    def base_vectors(self) -> list[tuple[int, ...]]:
        return list(product(range(2), repeat=self.n))

    @cached_property
    def fiber_vectors(self) -> list[tuple[int, ...]]:
        return list(product(range(4), repeat=self.n))

    @property
    def zero(self) -> str:
        return _name("u", (0,) * self.n)

    def u(self, vector: tuple[int, ...]) -> str:
        return _name("u", tuple(v % 2 for v in vector))

    def s(self, vector: tuple[int, ...]) -> str:
        return _name("s", tuple(v % 4 for v in vector))

    def iota(self, u: str) -> str:
        return self.s(tuple(2 * v for v in _vector(u)))

    def pi(self, s: str) -> str:
        return self.u(_vector(s))

    def add_u(self, first: str, second: str) -> str:
        return self.u(tuple(x + y for x, y in zip(_vector(first), _vector(second))))

    def add_s(self, first: str, second: str) -> str:
        return self.s(tuple(x + y for x, y in zip(_vector(first), _vector(second))))

    def sub_s(self, first: str, second: str) -> str:
        return self.s(tuple(x - y for x, y in zip(_vector(first), _vector(second))))

    def verify_exactness(self) -> CheckResult:
        """ι injective, π onto, ker π = im ι, and both maps additive."""
        us = [self.u(v) for v in self.base_vectors]
        ss = [self.s(v) for v in self.fiber_vectors]
        images = [self.iota(u) for u in us]
        if len(set(images)) != len(us):
            return CheckResult(False, {"node": "ι", "reason": "not injective"})
        if {self.pi(s) for s in ss} != set(us):
            return CheckResult(False, {"node": "π", "reason": "not onto"})
        kernel = {s for s in ss if self.pi(s) == self.zero}
        if kernel != set(images):
            return CheckResult(False, {"node": "S", "reason": "ker π differs from im ι"})
        for x, y in product(us, repeat=2):
            if self.iota(self.add_u(x, y)) != self.add_s(self.iota(x), self.iota(y)):
                return CheckResult(False, {"node": "ι", "reason": "not additive", "pair": [x, y]})
        for x, y in product(ss, repeat=2):
            if self.pi(self.add_s(x, y)) != self.add_u(self.pi(x), self.pi(y)):
                return CheckResult(False, {"node": "π", "reason": "not additive", "pair": [x, y]})
        return CheckResult(True, None, {"base": len(us), "fiber": len(ss)})

    def aut_count(self) -> int:
        return len(automorphism_group(self.structure, fixed_elements=self.structure.base_elements))

    def translation_of(self, sigma: ElementMap, point: str) -> str | None:
        """x with σ(s) = s + x on the fiber over `point`, if σ is a translation there."""
        shifts = {self.sub_s(sigma(s), s) for s in self.structure.fiber(point)}
        return next(iter(shifts)) if len(shifts) == 1 else None


def build_z4_example(n: int, max_n: int = 3) -> Z4Cover:
    if not 1 <= n <= max_n:
        raise PreconditionError(f"n must lie in 1..{max_n}, got {n}")
    shell = Z4Cover(n, MultiSortedStructure({}, {}, ()))
    us = [shell.u(v) for v in shell.base_vectors]
    ss = [shell.s(v) for v in shell.fiber_vectors]
    relations = {
        "U_add": Relation.of((BASE_SORT,) * 3, [(x, y, shell.add_u(x, y)) for x, y in product(us, repeat=2)]),
        "S_add": Relation.of((FIBER_SORT,) * 3, [(x, y, shell.add_s(x, y)) for x, y in product(ss, repeat=2)]),
        "iota": Relation.of((BASE_SORT, FIBER_SORT), [(u, shell.iota(u)) for u in us]),
        "pi": Relation.of((FIBER_SORT, BASE_SORT), [(s, shell.pi(s)) for s in ss]),
    }
    fiber_map = FiberMap(FIBER_SORT, tuple(us), ElementMap.from_dict({s: shell.pi(s) for s in ss}))
    structure = MultiSortedStructure({BASE_SORT: tuple(us), FIBER_SORT: tuple(ss)}, relations, (BASE_SORT,), fiber_map)
    cover = Z4Cover(n, structure)
    exactness = cover.verify_exactness()
    if not exactness:
        raise PreconditionError(f"Sequence is not exact: {exactness.counterexample}")
    return cover


def z4_depth3_determinacy(
    cover: Z4Cover, depth: int = 3, analyzer: StructureAnalyzer | None = None
) -> CheckResult:
    """
    Every compatible family (σ_c̄)_{|c̄| ≤ depth} extends to an automorphism
    over 𝕌. Also checks that each σ_a is a translation by some x_a ∈ ι(𝕌)
    and, for extending families, that x is additive with x_0 = 0.
    """
    extraction = extract_binding_simplicial_groupoid(cover.structure, analyzer, max_degree=depth)
    families = projective_limit_aut(extraction, depth)
    base = ElementMap.identity(cover.structure.base_elements)
    kernel = {cover.iota(u) for u in cover.structure.sorts[BASE_SORT]}
    points = cover.structure.fiber_map.base_set

    extending = 0
    translations_ok = True
    additive_ok = True
    first_failure = None
    for sigma in families:
        shifts = {a: cover.translation_of(sigma, a) for a in points}
        if any(x is None or x not in kernel for x in shifts.values()):
            translations_ok = False
        if cover.structure.is_automorphism(sigma.union(base)):
            extending += 1
            if shifts[cover.zero] != cover.iota(cover.zero) or any(
                shifts[cover.add_u(a, b)] != cover.add_s(shifts[a], shifts[b]) for a, b in product(points, repeat=2)
            ):
                additive_ok = False
        elif first_failure is None:
            first_failure = sigma.signature
    logger.info("Depth %d: %d families, %d extend", depth, len(families), extending)
    holds = extending == len(families) and translations_ok and additive_ok
    counterexample = None if first_failure is None else {"family": first_failure}
    return CheckResult(
        holds,
        counterexample,
        {
            "depth": depth,
            "families": len(families),
            "extending": extending,
            "translations": translations_ok,
            "additive": additive_ok,
        },
    )
