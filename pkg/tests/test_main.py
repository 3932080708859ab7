import sys
import os
import json
import pytest
from unittest.mock import patch, MagicMock

# Add parent directory to path to import modules
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

# Import main module explicitly from current directory
import main
from modules.DocumentCodec import read_document, write_document
from modules.Fixtures import sg_toy

@pytest.fixture(autouse=True)
def clear_environment(monkeypatch):
    monkeypatch.delenv("GCOVER_ORBIT_ARITY", raising=False)
    monkeypatch.delenv("GCOVER_MAX_DEGREE", raising=False)

@pytest.fixture
def mock_handler():
    with patch('main.CommandHandler') as mock:
        mock.return_value.handle_command.return_value = 0
        yield mock

@pytest.mark.parametrize("env_var, value", [
    ("GCOVER_ORBIT_ARITY", "3"),
    ("GCOVER_MAX_DEGREE", "2"),
])
def test_environment_variables(monkeypatch, tmp_path, mock_handler, env_var, value):
    monkeypatch.setenv(env_var, value)
    main.main(["fixtures", "-d", str(tmp_path)])
    config = mock_handler.call_args[0][0]
    key = {"GCOVER_ORBIT_ARITY": "orbit_arity", "GCOVER_MAX_DEGREE": "max_degree"}[env_var]
    assert config.get(key) == int(value)

def test_flags_override_environment(monkeypatch, tmp_path, mock_handler):
    monkeypatch.setenv("GCOVER_ORBIT_ARITY", "3")
    main.main(["extract", "--orbit-arity", "4", "-d", str(tmp_path)])
    assert mock_handler.call_args[0][0].get("orbit_arity") == 4

def test_verb_reaches_the_handler(tmp_path, mock_handler):
    assert main.main(["z4", "--n", "1", "-d", str(tmp_path)]) == 0
    args = mock_handler.return_value.handle_command.call_args[0][0]
    assert args.verb == "z4"
    assert args.n == 1

@patch('argparse.ArgumentParser.print_help')
def test_no_verb_prints_help(mock_print_help, tmp_path, mock_handler):
    assert main.main(["-d", str(tmp_path)]) == 2
    mock_print_help.assert_called_once()
    mock_handler.assert_not_called()

def test_create_config_option(tmp_path, mock_handler):
    assert main.main(["--create-config", "-d", str(tmp_path)]) == 0
    assert os.path.exists(tmp_path / "config.toml")
    mock_handler.assert_not_called()

def test_unknown_verb_is_a_usage_error(tmp_path):
    with pytest.raises(SystemExit) as info:
        main.main(["frobnicate", "-d", str(tmp_path)])
    assert info.value.code == 2

@patch('logging.basicConfig')
def test_verbose_configures_logging(mock_basic_config, tmp_path, mock_handler):
    main.main(["fixtures", "--verbose", "-d", str(tmp_path)])
    mock_basic_config.assert_called_once()
    assert mock_basic_config.call_args[1]["stream"] is sys.stderr

def test_version_option(capsys):
    with pytest.raises(SystemExit):
        main.main(["--version"])
    assert "0.3.0" in capsys.readouterr().out

class TestEndToEnd:
    def test_z4_report(self, tmp_path):
        report = tmp_path / "report.json"
        assert main.main(["z4", "--n", "1", "--out", str(report), "-d", str(tmp_path)]) == 0
        assert read_document(str(report), "report").value.results["aut_count"] == 2

    def test_bad_document(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"format_version": "1.0", "kind": "structure", "payload": {"relations": []}}))
        assert main.main(["validate", "--in", str(bad), "-d", str(tmp_path)]) == 2
        assert "(at $.payload." in capsys.readouterr().err

    @pytest.mark.timeout(300)
    def test_verify_binding(self, tmp_path):
        groupoid = tmp_path / "toy.json"
        write_document(str(groupoid), sg_toy())
        report = tmp_path / "report.json"
        argv = ["verify-binding", "--in", str(groupoid), "--component", "a,b", "--out", str(report), "-d", str(tmp_path)]
        assert main.main(argv) == 0
        assert read_document(str(report)).value.results["components"]["a,b"]["holds"]
