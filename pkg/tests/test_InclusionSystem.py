import sys
import os
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import pytest
from hypothesis import given, settings, strategies as st
from modules.ElementMap import Arrow, ElementMap
from modules.Errors import InconsistentSeedError, PreconditionError, UnknownIdentifierError
from modules.Fixtures import random_simplicial_groupoid, sg_toy, sg_toy3
from modules.InclusionSystem import (
    ChoiceLog,
    InclusionSystem,
    build_inclusion_system,
    diff_systems,
    extend_inclusion_system,
    find_simplicial_automorphism,
)
from modules.SimplicialGroupoid import fibered_simplicial_groupoid, fill_square

TWISTED_A_INTO_ABC = Arrow("Pa", "Pabc", ElementMap.from_dict({"Pa.a1": "Pabc.a2", "Pa.a2": "Pabc.a1"}))


@pytest.fixture
def toy3():
    return sg_toy3()


class TestBuild:
    def test_toy_system(self):
        groupoid = sg_toy()
        system = build_inclusion_system(groupoid)
        assert system.chosen_object == {"a": "Pa", "b": "Pb", "a,b": "Pab"}
        assert len(system.maps) == 2
        assert system.triples() == []
        assert system.validate(groupoid).is_valid

    def test_toy3_system(self, toy3):
        system = build_inclusion_system(toy3)
        assert len(system.chosen_object) == 7
        assert len(system.maps) == 12
        assert len(system.triples()) == 6
        assert system.validate(toy3).is_valid

    def test_default_choices_are_canonical(self, toy3):
        system = build_inclusion_system(toy3)
        assert system.map_for("a", "a,b,c") == Arrow(
            "Pa", "Pabc", ElementMap.from_dict({"Pa.a1": "Pabc.a1", "Pa.a2": "Pabc.a2"})
        )

    def test_twisted_seed(self, toy3):
        seed = InclusionSystem((), {}, {("a", "a,b,c"): TWISTED_A_INTO_ABC})
        system = build_inclusion_system(toy3, seed=seed)
        assert system.validate(toy3).is_valid
        assert system.map_for("a", "a,b,c") == TWISTED_A_INTO_ABC
        difference = diff_systems(system, build_inclusion_system(toy3))
        assert "a|a,b,c" in difference["maps"]
        assert len(difference["maps"]) > 1

    def test_seed_failing_a_triple(self, toy3):
        canonical = build_inclusion_system(toy3)
        seed = InclusionSystem(
            (),
            {},
            {
                ("a", "a,b"): canonical.map_for("a", "a,b"),
                ("a,b", "a,b,c"): canonical.map_for("a,b", "a,b,c"),
                ("a", "a,b,c"): TWISTED_A_INTO_ABC,
            },
        )
        with pytest.raises(InconsistentSeedError):
            build_inclusion_system(toy3, seed=seed)

    def test_seed_with_unknown_component(self, toy3):
        with pytest.raises(UnknownIdentifierError):
            build_inclusion_system(toy3, seed=InclusionSystem((), {"a,z": "Pa"}, {}))

    def test_free_choices_are_logged(self, toy3):
        log = ChoiceLog()
        build_inclusion_system(toy3, log=log)
        assert set(log.maps) == {"a|a,b", "b|a,b", "a,b|a,b,c", "a,c|a,b,c", "b,c|a,b,c", "c|a,b,c"}
        assert log.objects == {}
        assert ChoiceLog.from_dict(log.to_dict()) == log

    def test_lower_maps_fill_squares_over_the_top(self, toy3):
        system = build_inclusion_system(toy3)
        for small, big in [("a", "a,c"), ("c", "a,c"), ("b", "b,c"), ("c", "b,c")]:
            filler = fill_square(toy3, system.map_for(small, "a,b,c"), system.map_for(big, "a,b,c"))
            assert system.map_for(small, big) == filler

    def test_old_subsets_reach_the_top_through_the_old_top(self, toy3):
        system = build_inclusion_system(toy3)
        through = system.map_for("a,b", "a,b,c").after(system.map_for("b", "a,b"))
        assert system.map_for("b", "a,b,c") == through

    def test_replayed_forced_map_must_agree(self, toy3):
        canonical = build_inclusion_system(toy3)
        other = [a for a in toy3.arrows("Pa", "Pac") if a != canonical.map_for("a", "a,c")][0]
        pinned = {key: canonical.map_for(*key.split("|")).morphism_id for key in ["a,b|a,b,c", "a,c|a,b,c"]}
        replay = ChoiceLog({}, {**pinned, "a|a,c": other.morphism_id})
        with pytest.raises(InconsistentSeedError):
            build_inclusion_system(toy3, replay=replay)




class TestExtend:
    def test_extension_matches_fresh_build(self, toy3):
        partial = build_inclusion_system(toy3.restrict_base(["a", "b"]))
        extended = extend_inclusion_system(toy3, partial, "c")
        assert extended.restrict(["a", "b"]) == partial
        assert extended == build_inclusion_system(toy3)

    def test_isolated_point_adds_only_its_object(self):
        groupoid = fibered_simplicial_groupoid(["a", "b"], {"a": ["x"], "b": ["y"]}, max_degree=1)
        start = extend_inclusion_system(groupoid, InclusionSystem.empty(), "a")
        extended = extend_inclusion_system(groupoid, start, "b")
        assert set(extended.chosen_object) == {"a", "b"}
        assert extended.maps == {}

    def test_point_already_present(self, toy3):
        system = build_inclusion_system(toy3)
        with pytest.raises(PreconditionError):
            extend_inclusion_system(toy3, system, "a")

    def test_successive_extensions_differ_only_in_free_choices(self, toy3):
        start = extend_inclusion_system(toy3, InclusionSystem.empty(), "a")
        first_log, second_log = ChoiceLog(), ChoiceLog()
        first = extend_inclusion_system(toy3, extend_inclusion_system(toy3, start, "b", log=first_log), "c", log=first_log)
        second = extend_inclusion_system(toy3, extend_inclusion_system(toy3, start, "c", log=second_log), "b", log=second_log)
        assert first.validate(toy3).is_valid and second.validate(toy3).is_valid
        difference = diff_systems(first, second)
        assert set(difference["maps"]) <= first_log.keys() | second_log.keys()


class TestReplay:
    def test_altered_choice_gives_connected_system(self, toy3):
        log = ChoiceLog()
        original = build_inclusion_system(toy3, log=log)
        altered = ChoiceLog.from_dict(log.to_dict())
        other = [a for a in toy3.arrows("Pa", "Pab") if a.morphism_id != log.maps["a|a,b"]][0]
        altered.maps["a|a,b"] = other.morphism_id
        replayed = build_inclusion_system(toy3, replay=altered)
        assert replayed.validate(toy3).is_valid
        assert replayed.map_for("a", "a,b") == other
        connecting = find_simplicial_automorphism(toy3, original, replayed)
        assert connecting is not None
        assert set(connecting) == set(original.chosen_object)

    def test_replay_of_log_reproduces_system(self, toy3):
        log = ChoiceLog()
        original = build_inclusion_system(toy3, log=log)
        assert build_inclusion_system(toy3, replay=log) == original


@pytest.mark.timeout(60)
@settings(max_examples=100, deadline=None)
@given(st.randoms(use_true_random=False))
def test_random_groupoids_get_commuting_systems(rng):
    groupoid = random_simplicial_groupoid(rng, max_points=3)
    log = ChoiceLog()
    system = build_inclusion_system(groupoid, log=log)
    assert system.validate(groupoid).is_valid
    if log.maps:
        key = sorted(log.maps)[0]
        small, big = key.split("|")
        candidates = groupoid.arrows(system.chosen_object[small], system.chosen_object[big])
        replayed = None
        for candidate in candidates:
            if candidate.morphism_id == log.maps[key]:
                continue
            try:
                replayed = build_inclusion_system(groupoid, replay=ChoiceLog({}, {key: candidate.morphism_id}))
                break
            except InconsistentSeedError:
                continue
        assert replayed is not None
        assert replayed.validate(groupoid).is_valid
        assert find_simplicial_automorphism(groupoid, system, replayed) is not None
