import sys
import os
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from itertools import permutations

import pytest
from modules.ElementMap import ElementMap
from modules.Errors import PreconditionError, UnknownIdentifierError
from modules.Fixtures import structure_marked_pair, structure_two_points
from modules.IsomorphismSearch import automorphism_group
from modules.StructureAnalyzer import StructureAnalyzer
from modules.Z4Cover import build_z4_example


@pytest.fixture
def analyzer():
    return StructureAnalyzer()


@pytest.fixture(scope="module")
def z4_one():
    return build_z4_example(1)


def fiber_group(structure, elements):
    group = automorphism_group(structure, fixed_elements=structure.base_elements)
    return {g.restrict(elements) for g in group}


class TestRestrict:
    def test_single_fiber_of_z4(self, analyzer, z4_one):
        restricted = analyzer.restrict_structure(z4_one.structure, fiber_subset=["u1"], fix_base=True)
        assert restricted.sorts["S"] == ("s1", "s3")
        assert len(fiber_group(restricted, restricted.sorts["S"])) == 2

    def test_zero_fiber_is_pinned(self, analyzer, z4_one):
        restricted = analyzer.restrict_structure(z4_one.structure, fiber_subset=["u0"], fix_base=True)
        assert len(fiber_group(restricted, restricted.sorts["S"])) == 1

    @pytest.mark.timeout(120)
    def test_two_independent_fibers_of_z4(self, analyzer):
        cover = build_z4_example(2)
        restricted = analyzer.restrict_structure(
            cover.structure, fiber_subset=["u10", "u01"], fix_base=True, orbit_sorts=["S"]
        )
        assert len(restricted.sorts["S"]) == 8
        assert len(fiber_group(restricted, restricted.sorts["S"])) == 16

    def test_full_restriction_keeps_automorphisms(self, analyzer):
        structure = structure_two_points()
        restricted = analyzer.restrict_structure(structure)
        assert set(automorphism_group(restricted)) == set(automorphism_group(structure))

    def test_parameters_add_fiber_predicates(self, analyzer):
        restricted = analyzer.restrict_structure(structure_two_points(), parameters=["a"])
        assert restricted.relations["fiber[a]"].tuples == frozenset({("x1",), ("x2",)})

    def test_orbit_relations_are_named(self, analyzer):
        restricted = analyzer.restrict_structure(structure_two_points(), fix_base=True)
        unary = [r for name, r in restricted.relations.items() if name.startswith("orbit1_")]
        assert frozenset({("x1",), ("x2",)}) in {r.tuples for r in unary}

    def test_base_sorts_must_stay(self, analyzer):
        with pytest.raises(PreconditionError):
            analyzer.restrict_structure(structure_two_points(), sorts=["S"])

    def test_unknown_parameter(self, analyzer):
        with pytest.raises(UnknownIdentifierError):
            analyzer.restrict_structure(structure_two_points(), parameters=["nope"])

    def test_unknown_fiber_point(self, analyzer):
        with pytest.raises(UnknownIdentifierError):
            analyzer.restrict_structure(structure_two_points(), fiber_subset=["z"])

    def test_orbit_arity_must_be_positive(self):
        with pytest.raises(PreconditionError):
            StructureAnalyzer(orbit_arity=0)


class TestStableEmbedding:
    def test_structure_in_itself(self, analyzer):
        structure = structure_two_points()
        assert analyzer.check_stable_embedding(structure, structure)

    def test_marked_pair_loses_its_mark(self, analyzer):
        structure = structure_marked_pair()
        result = analyzer.check_stable_embedding(structure, structure.without_relations())
        assert not result
        assert result.counterexample["moved"] == {"s1": "s2", "s2": "s1"}

    @pytest.mark.timeout(120)
    @pytest.mark.parametrize("n", [1, 2])
    def test_universe_inside_z4(self, analyzer, n):
        structure = build_z4_example(n).structure
        sub = analyzer.restrict_structure(structure, sorts=["U"])
        assert analyzer.check_stable_embedding(structure, sub)

    @pytest.mark.timeout(300)
    @pytest.mark.parametrize("points", [["u10"], ["u10", "u01"], ["u11", "u01"], ["u00", "u11"]])
    def test_local_stable_embeddedness_in_z4(self, analyzer, points):
        structure = build_z4_example(2).structure
        sub = analyzer.restrict_structure(structure, fiber_subset=points, fix_base=True, orbit_sorts=["S"])
        assert analyzer.check_stable_embedding(structure, sub, fix_base=True)


class TestLocalGlobal:
    def test_identity(self, analyzer, z4_one):
        structure = z4_one.structure
        assert analyzer.local_global_check(structure, ElementMap.identity(structure.sorts["S"]))

    def test_translation_on_odd_fiber(self, analyzer, z4_one):
        tau = ElementMap.from_dict({"s0": "s0", "s1": "s3", "s2": "s2", "s3": "s1"})
        assert analyzer.local_global_check(z4_one.structure, tau)

    def test_translation_on_both_fibers(self, analyzer, z4_one):
        tau = ElementMap.from_dict({"s0": "s2", "s1": "s3", "s2": "s0", "s3": "s1"})
        result = analyzer.local_global_check(z4_one.structure, tau)
        assert not result
        assert result.counterexample["relation"] in ("S_add", "iota")

    def test_fiber_crossing_rejected(self, analyzer, z4_one):
        tau = ElementMap.from_dict({"s0": "s1", "s1": "s0", "s2": "s2", "s3": "s3"})
        with pytest.raises(PreconditionError):
            analyzer.local_global_check(z4_one.structure, tau)

    def test_agrees_with_automorphism_group(self, analyzer, z4_one):
        structure = z4_one.structure
        group = set(automorphism_group(structure, fixed_elements=structure.base_elements))
        base = ElementMap.identity(structure.base_elements)
        for even in permutations(["s0", "s2"]):
            for odd in permutations(["s1", "s3"]):
                tau = ElementMap.from_dict(dict(zip(["s0", "s2"], even)) | dict(zip(["s1", "s3"], odd)))
                holds = bool(analyzer.local_global_check(structure, tau))
                assert holds == (tau.union(base) in group)
