import sys
import os
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import pytest
from hypothesis import given, settings, strategies as st
from modules.Errors import UnknownIdentifierError
from modules.Fixtures import structure_free_pair, structure_two_points
from modules.IsomorphismSearch import IsomorphismSearch, automorphism_group, find_isomorphism, is_group
from modules.MultiSortedStructure import MultiSortedStructure, Relation, disjoint_cover_copy
from modules.Z4Cover import build_z4_example


class TestAutomorphismGroup:
    def test_free_pair_over_base(self):
        structure = structure_free_pair()
        group = automorphism_group(structure, fixed_sorts=["U"])
        assert len(group) == 2
        assert is_group(group)

    def test_paired_fibers(self):
        group = automorphism_group(structure_two_points(), fixed_sorts=["U"])
        assert len(group) == 2
        assert is_group(group)

    def test_directed_pairing_pins_the_points(self):
        group = automorphism_group(structure_two_points())
        assert len(group) == 2
        assert all(g("a") == "a" for g in group)

    def test_prescribed_assignment(self):
        group = automorphism_group(structure_two_points(), fixed_sorts=["U"], assignments={"x1": "x2"})
        assert len(group) == 1
        assert group[0]("y1") == "y2"

    def test_setwise_constraint(self):
        structure = structure_two_points()
        group = automorphism_group(structure, setwise=[["a", "x1", "x2"]])
        assert len(group) == 2
        assert all(g("a") == "a" for g in group)

    def test_limit(self):
        assert len(automorphism_group(structure_two_points(), limit=1)) == 1

    def test_unknown_sort(self):
        with pytest.raises(UnknownIdentifierError):
            automorphism_group(structure_free_pair(), fixed_sorts=["T"])

    @pytest.mark.timeout(60)
    @pytest.mark.parametrize("n,order", [(1, 2), (2, 16)])
    def test_z4_covers(self, n, order):
        structure = build_z4_example(n).structure
        group = automorphism_group(structure, fixed_elements=structure.base_elements)
        assert len(group) == order == 2 ** (n * n)
        assert is_group(group)

    def test_deterministic_order(self):
        structure = structure_two_points()
        first = automorphism_group(structure)
        second = automorphism_group(structure)
        assert [g.signature for g in first] == [g.signature for g in second]
        assert [g.signature for g in first] == sorted(g.signature for g in first)

    @given(st.randoms(use_true_random=False))
    @settings(max_examples=40, deadline=None)
    def test_random_graphs_give_groups(self, rng):
        vertices = tuple(f"v{i}" for i in range(rng.randint(1, 6)))
        edges = {(a, b) for a in vertices for b in vertices if a < b and rng.random() < 0.4}
        symmetric = edges | {(b, a) for a, b in edges}
        structure = MultiSortedStructure({"V": vertices}, {"E": Relation.of(("V", "V"), symmetric)}, ())
        group = automorphism_group(structure)
        assert is_group(group)
        for g in group:
            assert structure.is_automorphism(g)


class TestIsomorphisms:
    def test_copy_is_isomorphic_over_base(self):
        structure = structure_two_points()
        copy, renaming = disjoint_cover_copy(structure, "'", rename_sorts=False)
        found = find_isomorphism(structure, copy)
        assert found is not None
        assert found("a") == "a"
        assert found("x1") in ("'x1", "'x2")

    def test_different_bases_never_match(self):
        structure = structure_two_points()
        other = structure.rename({"a": "c"})
        assert find_isomorphism(structure, other) is None
        assert find_isomorphism(structure, other, fix_base=False) is not None

    def test_non_isomorphic(self):
        first = MultiSortedStructure({"V": ("p", "q")}, {"E": Relation.of(("V", "V"), [("p", "q")])}, ())
        second = MultiSortedStructure({"V": ("p", "q")}, {"E": Relation.of(("V", "V"), [])}, ())
        assert IsomorphismSearch(first, second).first() is None

    def test_search_counts_nodes(self):
        search = IsomorphismSearch(structure_two_points(), structure_two_points())
        search.all()
        assert search.nodes > 0
