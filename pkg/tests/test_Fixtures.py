import sys
import os
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import pytest
import yaml
from modules.DocumentCodec import kind_of
from modules.Errors import UnknownIdentifierError
from modules.Fixtures import build_fixture, load_corpus, sg_toy


@pytest.fixture
def corpus():
    return load_corpus()


class TestCorpus:
    def test_every_fixture_builds_with_its_kind(self, corpus):
        for entry in corpus["fixtures"]:
            assert kind_of(build_fixture(entry["name"], corpus)) == entry["kind"], entry["name"]

    def test_law_groups_pair_up(self, corpus):
        laws = corpus["laws"]
        assert len(laws["groupoids"]) == len(laws["covers"])

    def test_factory_arguments(self, corpus):
        assert len(build_fixture("z4-2", corpus).fiber_map.base_set) == 4
        assert build_fixture("sg-toy", corpus) == sg_toy()

    def test_unknown_name(self, corpus):
        with pytest.raises(UnknownIdentifierError):
            build_fixture("nope", corpus)

    def test_unknown_factory(self):
        corpus = {"fixtures": [{"name": "x", "kind": "structure", "factory": "no_such_factory"}]}
        with pytest.raises(UnknownIdentifierError, match="no_such_factory"):
            build_fixture("x", corpus)

    def test_law_names_must_exist(self, tmp_path):
        path = tmp_path / "corpus.yaml"
        path.write_text(yaml.safe_dump({"fixtures": [], "laws": {"covers": ["ghost"]}}))
        with pytest.raises(UnknownIdentifierError, match="ghost"):
            load_corpus(str(path))
