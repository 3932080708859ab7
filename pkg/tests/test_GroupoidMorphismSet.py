import sys
import os
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import pytest
from modules.ConcreteGroupoid import ConcreteGroupoid
from modules.ElementMap import Arrow, ElementMap
from modules.Errors import PreconditionError
from modules.Fixtures import sg_toy
from modules.GroupoidMorphismSet import (
    GroupoidMorphismSet,
    check_condition_A,
    check_condition_Bprime,
    check_relation_compatibility,
    compose_morphism_sets,
    disjoint_copy,
    glue_isomorphism,
    identity_morphism_set,
)


def arrow(source, target, pairs):
    return Arrow(source, target, ElementMap.from_dict(pairs))


@pytest.fixture
def toy():
    return sg_toy()


@pytest.fixture
def inclusion(toy):
    return toy.inclusions[(1, 2)]


@pytest.fixture
def two_object_component():
    return ConcreteGroupoid.generate(
        {"O1": ["1", "2"], "O2": ["3", "4"]},
        {"O1": "c", "O2": "c"},
        {"c": ["a"]},
        [arrow("O1", "O1", {"1": "2", "2": "1"}), arrow("O1", "O2", {"1": "3", "2": "4"})],
    )


class TestConditionA:
    def test_identity_morphism(self, toy):
        for groupoid in toy.degree_groupoids.values():
            assert check_condition_A(identity_morphism_set(groupoid))

    def test_inclusion_translates(self, inclusion):
        assert len(inclusion.maps_between("Pa", "Pab")) == 2
        assert check_condition_A(inclusion)

    def test_deleting_one_translate_keeps_A_but_breaks_Bprime(self, inclusion):
        dropped = inclusion.maps_between("Pa", "Pab")[0]
        reduced = GroupoidMorphismSet(inclusion.source, inclusion.target, inclusion.maps - {dropped})
        assert check_condition_A(reduced)
        assert not check_condition_Bprime(reduced)

    def test_fiber_crossing_map_breaks_A(self, inclusion):
        stray = arrow("Pa", "Pab", {"p1": "r1", "p2": "r3"})
        widened = GroupoidMorphismSet(inclusion.source, inclusion.target, inclusion.maps | {stray})
        result = check_condition_A(widened)
        assert not result
        assert set(result.counterexample) == {"h_p", "h_m", "side", "function"}


class TestConditionBprime:
    def test_identity_morphism(self, two_object_component):
        result = check_condition_Bprime(identity_morphism_set(two_object_component))
        assert result.holds
        assert result.details["B"]

    def test_restricted_domain_keeps_B_only(self, two_object_component):
        full = identity_morphism_set(two_object_component)
        restricted = GroupoidMorphismSet(
            two_object_component, two_object_component, frozenset(a for a in full.maps if a.source == "O1")
        )
        result = check_condition_Bprime(restricted)
        assert not result.holds
        assert result.details["B"]
        assert result.counterexample["kind"] == "precomposition"

    def test_inclusion(self, inclusion):
        assert check_condition_Bprime(inclusion)


class TestRelationCompatibility:
    def test_equality_relation(self, toy):
        groupoid = toy.degree_groupoids[1]
        relation = {(c, c) for c in groupoid.component_label}
        assert check_relation_compatibility(identity_morphism_set(groupoid), relation)

    def test_stray_cross_component_map(self, toy):
        groupoid = toy.degree_groupoids[1]
        identity = identity_morphism_set(groupoid)
        stray = arrow("Pa", "Pb", {"p1": "q1", "p2": "q2"})
        widened = GroupoidMorphismSet(groupoid, groupoid, identity.maps | {stray})
        relation = {(c, c) for c in groupoid.component_label}
        result = check_relation_compatibility(widened, relation)
        assert not result
        assert result.counterexample["components"] == ["a", "b"]

    def test_empty_set_against_nonempty_relation(self, toy):
        groupoid = toy.degree_groupoids[1]
        empty = GroupoidMorphismSet(groupoid, groupoid, frozenset())
        assert not check_relation_compatibility(empty, {("a", "a")})
        assert "empty" in empty.validate().codes()

    def test_inclusion_follows_subset_order(self, inclusion):
        assert check_relation_compatibility(inclusion, {("a", "a,b"), ("b", "a,b")})


class TestGlue:
    @pytest.fixture
    def pair_of_involutions(self):
        first = ConcreteGroupoid.generate({"X": ["1", "2"]}, {"X": "c"}, {"c": ["a"]}, [arrow("X", "X", {"1": "2", "2": "1"})])
        second = ConcreteGroupoid.generate({"Y": ["3", "4"]}, {"Y": "d"}, {"d": ["a"]}, [arrow("Y", "Y", {"3": "4", "4": "3"})])
        maps = frozenset({arrow("X", "Y", {"1": "3", "2": "4"}), arrow("X", "Y", {"1": "4", "2": "3"})})
        return GroupoidMorphismSet(first, second, maps, frozenset({("c", "d")}))

    def test_two_involutions(self, pair_of_involutions):
        glued = glue_isomorphism(pair_of_involutions)
        assert len(glued.objects) == 2
        assert len(glued.morphisms) == 8
        assert glued.validate().is_valid

    def test_identity_onto_copy_doubles_components(self, two_object_component):
        copy, morphism_set = disjoint_copy(two_object_component, "'")
        glued = glue_isomorphism(morphism_set)
        assert glued.validate().is_valid
        assert len(glued.objects_in("c")) == 4

    def test_toy_degree_one_with_copy(self, toy):
        groupoid = toy.degree_groupoids[1]
        copy, morphism_set = disjoint_copy(groupoid, "'")
        assert len(morphism_set.maps_between("Pa", "'Pa")) == 2
        glued = glue_isomorphism(morphism_set)
        for component in ("a", "b"):
            members = glued.objects_in(component)
            count = sum(len(glued.hom(s, t)) for s in members for t in members)
            assert count == 8

    def test_embedding_property(self, pair_of_involutions):
        glued = glue_isomorphism(pair_of_involutions)
        assert glued.restrict_to_objects(["X"]).morphisms == pair_of_involutions.source.morphisms
        assert glued.restrict_to_objects(["Y"]).morphisms == pair_of_involutions.target.morphisms

    def test_refuses_set_failing_Bprime(self, pair_of_involutions):
        partial = GroupoidMorphismSet(
            pair_of_involutions.source, pair_of_involutions.target, frozenset(list(pair_of_involutions.sorted_maps)[:1])
        )
        with pytest.raises(PreconditionError):
            glue_isomorphism(partial)


def test_composition_of_inclusion_with_identity(toy, inclusion):
    composite = compose_morphism_sets(identity_morphism_set(toy.degree_groupoids[2]), inclusion)
    assert composite.maps == inclusion.maps
