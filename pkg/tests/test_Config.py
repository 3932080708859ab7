import shutil
import sys
import os
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import toml
import pytest
from modules.Config import Config
from modules.Types import ConfigModel
from unittest.mock import patch
from pydantic import ValidationError

@pytest.fixture(autouse=True)
def clear_environment(monkeypatch):
    monkeypatch.delenv("GCOVER_ORBIT_ARITY", raising=False)
    monkeypatch.delenv("GCOVER_MAX_DEGREE", raising=False)

@pytest.fixture
def tmp_dir():
    return os.path.join(os.getenv('TMPDIR', '/tmp'), 'test_gcover_config')

# Helper function to create a temporary config file
def create_temp_config_file(content, filename='config.toml'):
    tmp_dir = os.path.join(os.getenv('TMPDIR', '/tmp'), 'test_gcover_config')
    os.makedirs(tmp_dir, exist_ok=True)
    config_file = os.path.join(tmp_dir, filename)
    with open(config_file, 'w') as file:
        toml.dump(content, file)
    return config_file

def remove_tmp_dir():
    tmp_dir = os.path.join(os.getenv('TMPDIR', '/tmp'), 'test_gcover_config')
    if os.path.exists(tmp_dir) and os.path.isdir(tmp_dir):
        print(f"Cleaning up temporary files in {tmp_dir}")
        shutil.rmtree(tmp_dir)

# Fixture to clean up temporary files after tests
@pytest.fixture
def cleanup_temp_files(tmp_dir):
    yield
    remove_tmp_dir()

def test_load_config_with_valid_file(cleanup_temp_files):
    config_file = create_temp_config_file({"orbit_arity": 3, "max_degree": 2, "report_indent": 4})
    config = Config(data_directory=os.path.dirname(config_file))
    assert config.get("orbit_arity") == 3
    assert config.get("max_degree") == 2
    assert config.get("report_indent") == 4

def test_load_config_with_partial_data(cleanup_temp_files):
    config_file = create_temp_config_file({"z4_max_n": 2})
    config = Config(data_directory=os.path.dirname(config_file))
    assert config.get("z4_max_n") == 2
    assert config.get("orbit_arity") == 2
    assert config.get("corpus_file") == ""

def test_load_config_with_missing_file(tmp_dir, cleanup_temp_files):
    config = Config(data_directory=tmp_dir)
    assert config.config == ConfigModel()
    assert not os.path.exists(os.path.join(tmp_dir, "config.toml"))

def test_data_directory_is_expanded():
    config = Config(data_directory="~/somewhere")
    assert config.get("data_directory") == os.path.expanduser("~/somewhere")

def test_environment_overrides_file(cleanup_temp_files, monkeypatch, capsys):
    config_file = create_temp_config_file({"orbit_arity": 3})
    monkeypatch.setenv("GCOVER_ORBIT_ARITY", "4")
    config = Config(data_directory=os.path.dirname(config_file))
    assert config.get("orbit_arity") == 4
    assert "GCOVER_ORBIT_ARITY" in capsys.readouterr().err

def test_overrides_beat_environment(cleanup_temp_files, monkeypatch):
    config_file = create_temp_config_file({"max_degree": 1})
    monkeypatch.setenv("GCOVER_MAX_DEGREE", "2")
    config = Config(data_directory=os.path.dirname(config_file), overrides={"max_degree": 3})
    assert config.get("max_degree") == 3

def test_none_overrides_are_ignored(cleanup_temp_files):
    config_file = create_temp_config_file({"orbit_arity": 3})
    config = Config(data_directory=os.path.dirname(config_file), overrides={"orbit_arity": None})
    assert config.get("orbit_arity") == 3

def test_load_config_with_invalid_data(cleanup_temp_files):
    config_file = create_temp_config_file({"orbit_arity": 0})
    with pytest.raises(ValidationError):
        Config(data_directory=os.path.dirname(config_file))

def test_load_config_with_malformed_file(tmp_dir, cleanup_temp_files, capsys):
    os.makedirs(tmp_dir, exist_ok=True)
    with open(os.path.join(tmp_dir, "config.toml"), "w") as file:
        file.write("orbit_arity = = 3\n")
    with pytest.raises(Exception):
        Config(data_directory=tmp_dir)
    assert "Error loading config file" in capsys.readouterr().err

def test_create_default_config(tmp_dir, cleanup_temp_files, capsys):
    config = Config(data_directory=tmp_dir, create_config=True)
    config_file = os.path.join(tmp_dir, "config.toml")
    assert os.path.exists(config_file)
    assert "Created default configuration file" in capsys.readouterr().err
    with open(config_file) as file:
        text = file.read()
    assert "# Arity bound for orbit relations" in text
    assert toml.loads(text) == ConfigModel().model_dump()
    assert config.get("fuzz_instances") == 100

def test_create_config_keeps_existing_file(cleanup_temp_files):
    config_file = create_temp_config_file({"orbit_arity": 5})
    with patch.object(Config, "save") as mock_save:
        config = Config(data_directory=os.path.dirname(config_file), create_config=True)
    mock_save.assert_not_called()
    assert config.get("orbit_arity") == 5

def test_save_round_trip(tmp_dir, cleanup_temp_files):
    os.makedirs(tmp_dir, exist_ok=True)
    config = Config(data_directory=tmp_dir, overrides={"fuzz_seed": 7})
    config.save()
    assert Config(data_directory=tmp_dir).get("fuzz_seed") == 7
