import sys
import os
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import pytest
from modules.ElementMap import ElementMap
from modules.Errors import PreconditionError
from modules.Z4Cover import build_z4_example, z4_depth3_determinacy


@pytest.fixture(scope="module")
def z4_one():
    return build_z4_example(1)


class TestConstruction:
    def test_sizes(self, z4_one):
        structure = z4_one.structure
        assert len(structure.sorts["U"]) == 2
        assert len(structure.sorts["S"]) == 4
        assert structure.fiber("u0") == ("s0", "s2")
        assert structure.fiber("u1") == ("s1", "s3")

    def test_exactness(self, z4_one):
        result = z4_one.verify_exactness()
        assert result
        assert result.details == {"base": 2, "fiber": 4}

    def test_arithmetic(self, z4_one):
        assert z4_one.iota("u1") == "s2"
        assert z4_one.pi("s3") == "u1"
        assert z4_one.add_s("s3", "s3") == "s2"
        assert z4_one.sub_s("s1", "s3") == "s2"

    @pytest.mark.parametrize("n", [0, 4])
    def test_out_of_range(self, n):
        with pytest.raises(PreconditionError):
            build_z4_example(n)

    def test_larger_cap(self):
        with pytest.raises(PreconditionError):
            build_z4_example(3, max_n=2)

    def test_translation_of(self, z4_one):
        sigma = ElementMap.from_dict({"s0": "s0", "s2": "s2", "s1": "s3", "s3": "s1"})
        assert z4_one.translation_of(sigma, "u1") == "s2"
        assert z4_one.translation_of(sigma, "u0") == "s0"

    def test_translation_of_non_translation(self):
        cover = build_z4_example(2)
        fiber = cover.structure.fiber("u10")
        swap = ElementMap.from_dict({fiber[0]: fiber[1], fiber[1]: fiber[0], fiber[2]: fiber[2], fiber[3]: fiber[3]})
        assert cover.translation_of(swap, "u10") is None


class TestDeterminacy:
    def test_one_dimensional(self, z4_one):
        assert z4_one.aut_count() == 2
        result = z4_depth3_determinacy(z4_one)
        assert result
        assert result.details["families"] == 2

    @pytest.mark.timeout(600)
    def test_depth_three_determines_z4_two(self):
        result = z4_depth3_determinacy(build_z4_example(2))
        assert result
        assert result.details["families"] == 16
        assert result.details["additive"]

    @pytest.mark.timeout(300)
    def test_depth_one_does_not(self):
        result = z4_depth3_determinacy(build_z4_example(2), depth=1)
        assert not result
        assert result.details["families"] == 64
        assert result.details["extending"] == 16
        assert result.details["translations"]
        assert "family" in result.counterexample
