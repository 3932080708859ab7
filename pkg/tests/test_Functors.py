import sys
import os
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import pytest
from modules.BindingExtraction import extract_binding_simplicial_groupoid
from modules.CoverConstruction import build_cover_from_simplicial
from modules.CoverMorphism import CoverMorphism
from modules.Errors import PreconditionError
from modules.Fixtures import sg_single_point, sg_toy, structure_free_pair, structure_two_points
from modules.Functors import (
    build_epsilon,
    build_eta,
    check_epsilon_naturality,
    check_functor_laws,
    check_identity_law_C,
    check_identity_law_G,
    copy_inclusion_system,
    functor_C_on_morphism,
    functor_G_on_morphism,
    round_trip_covers,
)
from modules.SimplicialMorphism import SimplicialMorphism, relabeling_corpus
from modules.UniverseEncoding import encode_many
from modules.Z4Cover import build_z4_example

LAWS = {"C-identity", "G-identity", "C-composition", "G-composition", "eta-naturality", "epsilon-naturality"}


class TestFunctorG:
    def test_identity_goes_to_identity(self):
        assert check_identity_law_G(structure_two_points())
        assert check_identity_law_G(build_z4_example(1).structure)

    def test_image_is_a_simplicial_isomorphism(self):
        identity = CoverMorphism.identity(structure_two_points())
        first = extract_binding_simplicial_groupoid(identity.first)
        second = extract_binding_simplicial_groupoid(identity.second)
        image = functor_G_on_morphism(identity, first, second)
        assert image.is_isomorphism()

    def test_extractions_must_match_the_covers(self):
        identity = CoverMorphism.identity(structure_two_points())
        first = extract_binding_simplicial_groupoid(identity.first)
        with pytest.raises(PreconditionError):
            functor_G_on_morphism(identity, first, first)


class TestFunctorC:
    def test_identity_law(self):
        assert check_identity_law_C(sg_single_point())
        assert check_identity_law_C(sg_toy())

    def test_relabeling_becomes_an_isomorphism(self):
        members, isomorphisms = relabeling_corpus(sg_toy(), tags=("'",))
        encodings = encode_many([(g, f"{i}:") for i, g in enumerate(members)])
        first = build_cover_from_simplicial(members[0], encodings[0], tag="*0")
        second = build_cover_from_simplicial(members[1], encodings[1], tag="*1")
        morphism = functor_C_on_morphism(isomorphisms[(0, 1)], first, second)
        assert morphism.is_isomorphism()
        assert morphism.mapping("*0[a]p1") in second.star_object("a")

    def test_rejects_foreign_groupoids(self):
        groupoid = sg_toy()
        (encoding,) = encode_many([(groupoid, "")])
        construction = build_cover_from_simplicial(groupoid, encoding)
        single = sg_single_point()
        with pytest.raises(PreconditionError):
            functor_C_on_morphism(SimplicialMorphism.identity(single), construction, construction)


class TestNaturalIsomorphisms:
    @pytest.mark.timeout(300)
    def test_eta_on_z4(self):
        (trip,) = round_trip_covers([build_z4_example(1).structure])
        eta = build_eta(trip)
        assert eta.is_isomorphism()
        assert eta.mapping("s1") in trip.construction.star_object("u1")

    def test_round_trip_of_nothing(self):
        assert round_trip_covers([]) == []

    def test_copy_inclusions_follow_the_fibers(self):
        extraction = extract_binding_simplicial_groupoid(structure_two_points())
        system = copy_inclusion_system(extraction)
        arrow = system.map_for("a", "a,b")
        assert arrow.mapping("o[a]#0") == "o[a,b]#0"
        assert system.validate(extraction.groupoid_in_U).is_valid

    @pytest.mark.timeout(300)
    def test_epsilon_on_toy(self):
        groupoid = sg_toy()
        construction = build_cover_from_simplicial(groupoid)
        extraction = extract_binding_simplicial_groupoid(construction.result)
        epsilon = build_epsilon(groupoid, construction, extraction)
        assert epsilon.is_bijective()
        assert extraction.summary() == {"a": 2, "b": 2, "a,b": 4}

    def test_epsilon_needs_the_right_construction(self):
        construction = build_cover_from_simplicial(sg_toy())
        extraction = extract_binding_simplicial_groupoid(construction.result)
        with pytest.raises(PreconditionError):
            build_epsilon(sg_single_point(), construction, extraction)

    @pytest.mark.timeout(300)
    def test_epsilon_naturality(self):
        _, isomorphisms = relabeling_corpus(sg_single_point(), tags=("'",))
        assert check_epsilon_naturality(isomorphisms[(0, 1)])


class TestLaws:
    @pytest.mark.timeout(600)
    def test_small_instances(self):
        results = check_functor_laws(sg_single_point(), structure_free_pair())
        assert set(results) == LAWS
        assert all(entry["failed"] == 0 for entry in results.values()), results
        assert results["G-composition"]["passed"] == 4
        assert results["eta-naturality"]["passed"] == 2
        assert results["C-composition"]["passed"] == 12
        assert results["epsilon-naturality"]["passed"] == 2

    @pytest.mark.timeout(1800)
    def test_toy_and_z4(self):
        results = check_functor_laws(sg_toy(), build_z4_example(1).structure)
        assert all(entry["failed"] == 0 for entry in results.values()), results
