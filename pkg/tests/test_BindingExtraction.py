import sys
import os
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import pytest
from modules.BindingExtraction import (
    binding_group,
    copy_object,
    extract_binding_simplicial_groupoid,
    global_fiber_group,
    projective_limit_aut,
)
from modules.Errors import LocalStableEmbeddednessError, PreconditionError
from modules.Fixtures import structure_alternating, structure_free_pair, structure_marked_pair
from modules.SimplicialGroupoid import subset_label
from modules.StructureAnalyzer import StructureAnalyzer
from modules.Z4Cover import build_z4_example


@pytest.fixture(scope="module")
def z4_one_extraction():
    return extract_binding_simplicial_groupoid(build_z4_example(1).structure)


@pytest.fixture(scope="module")
def z4_two():
    return build_z4_example(2)


class TestExtraction:
    def test_z4_binding_groups(self, z4_one_extraction):
        assert z4_one_extraction.summary() == {"u0": 1, "u1": 2, "u0,u1": 2}
        assert z4_one_extraction.points == ("u0", "u1")

    def test_free_pair_gives_full_symmetric_group(self):
        extraction = extract_binding_simplicial_groupoid(structure_free_pair())
        assert extraction.summary() == {"u": 2}
        assert extraction.groupoid_in_U.validate().is_valid

    def test_groupoid_objects_are_formal_copies(self, z4_one_extraction):
        level = z4_one_extraction.groupoid_in_U.degree_groupoids[1]
        assert set(level.object_ids) == {copy_object("u0"), copy_object("u1")}

    def test_copy_maps(self, z4_one_extraction):
        assert z4_one_extraction.copy_maps["u1"].as_dict == {"s1": "o[u1]#0", "s3": "o[u1]#1"}

    def test_embedding_family_reaches_the_fiber(self, z4_one_extraction):
        family = z4_one_extraction.embedding_family("u1")
        assert len(family) == 2
        for arrow in family:
            assert arrow.mapping.image == frozenset({"s1", "s3"})

    def test_extension_is_valid(self, z4_one_extraction):
        assert z4_one_extraction.extension.validate().is_valid

    def test_needs_a_fiber_map(self):
        with pytest.raises(PreconditionError):
            extract_binding_simplicial_groupoid(structure_marked_pair())

    @pytest.mark.timeout(120)
    def test_degree_three_component_of_z4(self, z4_two):
        label = subset_label(["u01", "u10", "u11"])
        assert len(binding_group(z4_two.structure, label)) == 16

    def test_degree_cap(self, z4_two):
        extraction = extract_binding_simplicial_groupoid(z4_two.structure, max_degree=1)
        assert extraction.labels == ["u00", "u01", "u10", "u11"]
        assert extraction.groupoid_in_U.degrees == (1,)


class TestLocalStableEmbeddedness:
    def test_alternating_fiber_does_not_lift(self):
        with pytest.raises(LocalStableEmbeddednessError) as raised:
            extract_binding_simplicial_groupoid(structure_alternating())
        assert raised.value.witness is not None

    def test_ternary_orbits_restore_the_alternating_group(self):
        extraction = extract_binding_simplicial_groupoid(structure_alternating(), StructureAnalyzer(orbit_arity=3))
        assert extraction.summary() == {"a": 12, "b": 1, "a,b": 12}


class TestProjectiveLimit:
    def test_matches_global_group_on_z4(self, z4_one_extraction):
        families = projective_limit_aut(z4_one_extraction, 2)
        assert len(families) == 2
        assert families == global_fiber_group(z4_one_extraction.cover)

    def test_depth_one_on_z4_two(self, z4_two):
        extraction = extract_binding_simplicial_groupoid(z4_two.structure, max_degree=1)
        assert len(projective_limit_aut(extraction, 1)) == 64

    def test_needs_positive_degree(self, z4_one_extraction):
        with pytest.raises(PreconditionError):
            projective_limit_aut(z4_one_extraction, 0)
