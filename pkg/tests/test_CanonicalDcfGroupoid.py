import sys
import os
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import pytest
from modules.CanonicalDcfGroupoid import (
    canonical_dcf_groupoid,
    dcf_bound_system,
    dcf_coordinate_system,
    element_name,
    point_name,
    translation_group,
)
from modules.Errors import PreconditionError


class TestCanonicalLevel:
    def test_no_bounded_relations(self):
        groupoid = canonical_dcf_groupoid([1, 2], 1, 8)
        (name,) = groupoid.object_ids
        assert len(groupoid.aut_group(name)) == 64
        assert groupoid.is_canonical()
        assert groupoid.validate().is_valid

    def test_relation_two_x_equals_y(self):
        groupoid = canonical_dcf_groupoid([1, 2], 2, 8)
        (name,) = groupoid.object_ids
        group = groupoid.aut_group(name)
        assert len(group) == 8
        first, second = point_name((1,)), point_name((2,))
        for arrow in group:
            x = int(arrow(element_name(0, first)).split("@")[0])
            y = int(arrow(element_name(0, second)).split("@")[0])
            assert (2 * x - y) % 8 == 0

    def test_translation_group_counts(self):
        assert len(translation_group([(1,), (2,)], 1, 8)) == 64
        assert len(translation_group([(1,), (2,)], 2, 8)) == 8

    def test_duplicate_elements_rejected(self):
        with pytest.raises(PreconditionError):
            canonical_dcf_groupoid([3, 3], 1, 8)

    @pytest.mark.parametrize("modulus", [None, 0])
    def test_infinite_level_rejected(self, modulus):
        with pytest.raises(PreconditionError):
            canonical_dcf_groupoid([1, 2], 1, modulus)

    def test_two_dimensional_elements(self):
        groupoid = canonical_dcf_groupoid([(1, 0), (0, 1), (1, 1)], 1, 3)
        (name,) = groupoid.object_ids
        assert len(groupoid.aut_group(name)) == 9
        assert len(groupoid.objects[name]) == 9


class TestSystems:
    @pytest.mark.timeout(60)
    def test_bound_system_is_valid(self):
        system = dcf_bound_system([1, 2], [2, 1], 8)
        assert system.indices == ("N1", "N2")
        assert system.validate_system().is_valid
        assert len(system.project_system("N2").morphisms) == 8
        assert system.join("N1", "N2") == "N2"

    def test_bound_system_needs_a_bound(self):
        with pytest.raises(PreconditionError):
            dcf_bound_system([1, 2], [], 8)

    @pytest.mark.timeout(60)
    def test_coordinate_system_is_valid(self):
        system = dcf_coordinate_system([1, 2], 2, 4)
        assert len(system.indices) == 3
        report = system.validate_system()
        assert report.is_valid, report.to_dict()
        top = f"{point_name((1,))},{point_name((2,))}"
        assert system.join(point_name((1,)), point_name((2,))) == top

    @pytest.mark.timeout(60)
    def test_coordinate_projection_restricts_translations(self):
        system = dcf_coordinate_system([1, 2], 2, 4)
        top = f"{point_name((1,))},{point_name((2,))}"
        lower = point_name((1,))
        images = {system.project_morphism(arrow, top, lower) for arrow in system.project_system(top).morphisms}
        assert images <= system.project_system(lower).morphisms
        assert len(images) == 4
