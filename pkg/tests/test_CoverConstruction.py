import sys
import os
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import pytest
from modules.BindingExtraction import extract_binding_simplicial_groupoid
from modules.CoverConstruction import (
    STAR_SORT,
    build_cover_from_groupoid,
    build_cover_from_simplicial,
    component_point,
    groupoid_as_simplicial,
    groupoid_binding_group,
    structure_binding_group,
    verify_binding_statement,
    verify_cover,
    verify_local_embeddedness,
)
from modules.ConcreteGroupoid import ConcreteGroupoid
from modules.Errors import PreconditionError, UnknownIdentifierError
from modules.Fixtures import sg_diagonal, sg_toy, sg_toy3, sg_toy_with_noninjective_inclusion, sg_trivial
from modules.SimplicialGroupoid import fibered_simplicial_groupoid
from modules.UniverseEncoding import encode_simplicial
from modules.Z4Cover import build_z4_example


@pytest.fixture(scope="module")
def toy_cover():
    return build_cover_from_simplicial(sg_toy())


class TestBuild:
    def test_star_sort(self, toy_cover):
        assert toy_cover.star_elements == ("*[a]p1", "*[a]p2", "*[b]q1", "*[b]q2")
        assert toy_cover.result.fiber("a") == ("*[a]p1", "*[a]p2")
        assert toy_cover.result.validate().is_valid

    def test_copy_maps(self, toy_cover):
        assert toy_cover.copy_map("a").as_dict == {"p1": "*[a]p1", "p2": "*[a]p2"}
        assert len(toy_cover.star_object("a,b")) == 4
        assert set(toy_cover.copy_map("a,b").image) == set(toy_cover.star_elements)

    def test_tag(self):
        construction = build_cover_from_simplicial(sg_toy(), tag="*1")
        assert construction.result.sorts[STAR_SORT][0] == "*1[a]p1"

    def test_auxiliary_elements_have_supports(self, toy_cover):
        result = toy_cover.result
        for element in result.sorts["M*"] + result.sorts["N*"]:
            assert result.supports[element] <= {"a", "b"}

    def test_unknown_component(self, toy_cover):
        with pytest.raises(UnknownIdentifierError):
            toy_cover.star_object("c")

    def test_noninjective_inclusion_rejected(self):
        with pytest.raises(PreconditionError):
            build_cover_from_simplicial(sg_toy_with_noninjective_inclusion())

    def test_foreign_encoding_rejected(self):
        with pytest.raises(PreconditionError):
            build_cover_from_simplicial(sg_toy(), encode_simplicial(sg_toy3()))


class TestBinding:
    @pytest.mark.parametrize("label,order", [("a", 2), ("b", 2), ("a,b", 4)])
    def test_toy(self, toy_cover, label, order):
        result = verify_binding_statement(toy_cover, label)
        assert result, result.counterexample
        assert result.details["groupoid_order"] == result.details["structure_order"] == order

    def test_diagonal_swap(self):
        construction = build_cover_from_simplicial(sg_diagonal())
        assert len(groupoid_binding_group(construction, "a,b")) == 2
        assert verify_binding_statement(construction, "a,b")

    def test_trivial_groupoid(self):
        construction = build_cover_from_simplicial(sg_trivial())
        assert len(structure_binding_group(construction, "a,b")) == 1

    @pytest.mark.timeout(300)
    def test_rebuilt_from_an_extraction(self):
        extraction = extract_binding_simplicial_groupoid(build_z4_example(1).structure)
        construction = build_cover_from_simplicial(extraction.groupoid_in_U)
        for label, order in extraction.summary().items():
            assert len(structure_binding_group(construction, label)) == order


class TestCoverChecks:
    @pytest.mark.timeout(300)
    def test_toy_is_a_cover(self, toy_cover):
        result = verify_cover(toy_cover)
        assert result, result.counterexample
        assert result.details["coherent_lifts"] >= 1
        assert result.details["automorphisms"] >= result.details["coherent_lifts"]

    @pytest.mark.timeout(300)
    def test_local_embeddedness(self, toy_cover):
        assert verify_local_embeddedness(toy_cover, "a", "a,b")

    def test_local_embeddedness_needs_proper_subset(self, toy_cover):
        with pytest.raises(PreconditionError):
            verify_local_embeddedness(toy_cover, "a,b", "a")


def three_cycle_with_two_objects():
    """One component with objects Q and Q~1, each acted on by a 3-cycle."""
    return fibered_simplicial_groupoid(
        ["a"],
        {"a": ["x1", "x2", "x3"]},
        generators=[{"x1": "x2", "x2": "x3", "x3": "x1"}],
        object_names={"a": "Q"},
        extra_objects={"a": 1},
    ).degree_groupoids[1]


class TestGroupoidCover:
    def test_one_point_per_component(self):
        assert groupoid_as_simplicial(sg_toy().degree_groupoids[1]).base_set == ("a", "b")
        assert groupoid_as_simplicial(sg_toy().degree_groupoids[2]).base_set == ("a+b",)
        assert component_point("a,b") == "a+b"

    def test_one_extra_object_per_component(self):
        groupoid = sg_toy().degree_groupoids[1]
        construction = build_cover_from_groupoid(groupoid)
        assert construction.star_object("a") == ("*[a]p1", "*[a]p2")
        assert construction.star_object("b") == ("*[b]q1", "*[b]q2")
        assert construction.result.validate().is_valid

    @pytest.mark.timeout(120)
    @pytest.mark.parametrize(
        "groupoid",
        [three_cycle_with_two_objects(), sg_toy().degree_groupoids[1], sg_diagonal().degree_groupoids[2]],
        ids=["connected", "two-components", "degree-two-component"],
    )
    def test_binding_groups_give_back_the_groupoid(self, groupoid):
        construction = build_cover_from_groupoid(groupoid)
        extraction = extract_binding_simplicial_groupoid(construction.result, max_degree=1)
        for component, names in groupoid.components.items():
            point = component_point(component)
            assert extraction.fiber_sets[point] == construction.star_object(point)
            assert list(extraction.fiber_groups[point]) == groupoid_binding_group(construction, point)
            for name in names:
                assert len(extraction.fiber_groups[point]) == len(groupoid.aut_group(name))
            assert verify_binding_statement(construction, point).holds

    def test_rejects_an_invalid_groupoid(self):
        groupoid = sg_toy().degree_groupoids[1]
        broken = ConcreteGroupoid(groupoid.objects, groupoid.component_of, groupoid.component_label, frozenset())
        with pytest.raises(PreconditionError):
            build_cover_from_groupoid(broken)
