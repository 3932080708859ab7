import sys
import os
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import pytest
from modules.ConcreteGroupoid import ConcreteGroupoid, close_arrows
from modules.ElementMap import Arrow, ElementMap
from modules.Errors import InvariantBreachError, PreconditionError, UnknownIdentifierError
from modules.Fixtures import sg_toy, sg_toy_with_second_object


def swap(source, target, pairs):
    return Arrow(source, target, ElementMap.from_dict(pairs))


@pytest.fixture
def identity_only():
    return ConcreteGroupoid.generate({"O": ["1", "2"]}, {"O": "c"}, {"c": ["a"]})


@pytest.fixture
def with_swap():
    return ConcreteGroupoid.generate(
        {"O": ["1", "2"]}, {"O": "c"}, {"c": ["a"]}, [swap("O", "O", {"1": "2", "2": "1"})]
    )


@pytest.fixture
def two_objects():
    """Full groupoid on two 2-element objects in one component."""
    return ConcreteGroupoid.generate(
        {"O1": ["1", "2"], "O2": ["3", "4"]},
        {"O1": "c", "O2": "c"},
        {"c": ["a"]},
        [swap("O1", "O1", {"1": "2", "2": "1"}), swap("O1", "O2", {"1": "3", "2": "4"})],
    )


@pytest.fixture
def toy():
    return sg_toy()


class TestValidate:
    """Validation reports every violated invariant."""

    def test_identity_only_is_valid(self, identity_only):
        assert identity_only.validate().is_valid

    def test_involution_closure_is_valid(self, with_swap):
        assert with_swap.validate().is_valid
        assert len(with_swap.morphisms) == 2

    def test_missing_inverse_is_reported(self):
        cross = swap("O1", "O2", {"1": "3", "2": "4"})
        groupoid = ConcreteGroupoid(
            objects={"O1": frozenset({"1", "2"}), "O2": frozenset({"3", "4"})},
            component_of={"O1": "c", "O2": "c"},
            component_label={"c": frozenset({"a"})},
            morphisms=frozenset(
                {
                    Arrow("O1", "O1", ElementMap.identity(["1", "2"])),
                    Arrow("O2", "O2", ElementMap.identity(["3", "4"])),
                    cross,
                }
            ),
        )
        report = groupoid.validate()
        assert "inverse-missing" in report.codes()
        assert any("inverse missing" in v.message for v in report.violations)

    def test_shared_element_breaks_disjointness(self):
        groupoid = ConcreteGroupoid.generate(
            {"O1": ["1", "2"], "O2": ["2", "3"]}, {"O1": "c", "O2": "d"}, {"c": ["a"], "d": ["b"]}
        )
        assert "disjointness" in groupoid.validate().codes()

    def test_cross_component_morphism_breaks_connectedness(self):
        groupoid = ConcreteGroupoid.generate(
            {"O1": ["1"], "O2": ["2"]}, {"O1": "c", "O2": "d"}, {"c": ["a"], "d": ["b"]},
            [swap("O1", "O2", {"1": "2"})],
        )
        assert "connectedness" in groupoid.validate().codes()

    def test_generate_rejects_non_bijection(self):
        with pytest.raises(PreconditionError):
            ConcreteGroupoid.generate({"O": ["1", "2"]}, {"O": "c"}, {"c": ["a"]}, [swap("O", "O", {"1": "1", "2": "1"})])


class TestHomSets:
    def test_full_groupoid_has_two_maps_between_objects(self, two_objects):
        assert len(two_objects.hom_set("O1", "O2")) == 2

    def test_distinct_components_have_empty_hom(self, toy):
        degree_one = toy.degree_groupoids[1]
        assert degree_one.hom_set("Pa", "Pb") == frozenset()

    def test_endomorphisms_contain_identity(self, two_objects):
        identity = Arrow("O2", "O2", ElementMap.identity(["3", "4"]))
        assert identity.morphism_id in two_objects.hom_set("O2", "O2")

    def test_unknown_object_raises(self, two_objects):
        with pytest.raises(UnknownIdentifierError, match="O9"):
            two_objects.hom_set("O1", "O9")

    def test_composition_of_hom_sets(self, two_objects):
        objects = two_objects.object_ids
        for first in objects:
            for second in objects:
                for third in objects:
                    composites = {
                        g.after(f) for f in two_objects.hom(first, second) for g in two_objects.hom(second, third)
                    }
                    assert composites == set(two_objects.hom(first, third))


class TestAutGroups:
    def test_pa_has_order_two(self, toy):
        assert len(toy.degree_groupoids[1].aut_group("Pa")) == 2

    def test_pab_has_order_four(self, toy):
        assert len(toy.degree_groupoids[2].aut_group("Pab")) == 4

    def test_identity_only_is_trivial(self, identity_only):
        assert len(identity_only.aut_group("O")) == 1

    def test_unclosed_hom_raises(self):
        broken = ConcreteGroupoid(
            objects={"O": frozenset({"1", "2", "3"})},
            component_of={"O": "c"},
            component_label={"c": frozenset({"a"})},
            morphisms=frozenset(
                {Arrow("O", "O", ElementMap.identity(["1", "2", "3"])), swap("O", "O", {"1": "2", "2": "3", "3": "1"})}
            ),
        )
        with pytest.raises(InvariantBreachError):
            broken.aut_group("O")

    def test_groups_in_one_component_are_conjugate(self, two_objects):
        first = set(two_objects.aut_group("O1"))
        second = set(two_objects.aut_group("O2"))
        for h in two_objects.hom("O1", "O2"):
            assert {h.after(g).after(h.inverse()) for g in first} == second


class TestFaithfulness:
    def test_pa_witness_is_single_point(self, toy):
        witnesses = toy.degree_groupoids[1].faithfulness_witnesses()
        assert witnesses["Pa"] == ("p1",)

    def test_identity_only_witness_is_empty(self, identity_only):
        result = identity_only.is_finitely_faithful()
        assert result.holds
        assert result.details["witnesses"] == {"O": []}

    def test_pab_witness_picks_one_point_per_fiber(self, toy):
        assert toy.degree_groupoids[2].faithfulness_witnesses()["Pab"] == ("r1", "r3")


class TestCanonical:
    def test_one_object_per_component(self, toy):
        assert toy.degree_groupoids[1].is_canonical()

    def test_second_object_in_component(self):
        assert not sg_toy_with_second_object().degree_groupoids[1].is_canonical()

    def test_with_copy_of_adds_isomorphic_object(self, toy):
        enlarged = toy.degree_groupoids[1].with_copy_of("Pa", "Pa2")
        assert not enlarged.is_canonical()
        assert enlarged.validate().is_valid
        assert len(enlarged.hom("Pa", "Pa2")) == 2


def test_close_arrows_adds_inverses():
    cycle = swap("O", "O", {"1": "2", "2": "3", "3": "1"})
    closed = close_arrows([cycle])
    assert len(closed) == 3
    assert cycle.inverse() in closed
