import sys

import pytest

from prodbg.config import DEFAULTS, ConfigError, dump_defaults, load_config

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


def test_defaults_copy():
    cfg = load_config()
    assert cfg == DEFAULTS
    cfg["limits"]["steps"] = 1
    assert DEFAULTS["limits"]["steps"] == 100_000


def test_file_then_overrides(tmp_path):
    path = tmp_path / "c.toml"
    path.write_text('[fl]\nformula = "tarantula"\n[limits]\nsteps = 10\n')
    cfg = load_config(path, {"limits": {"steps": 20}})
    assert cfg["fl"]["formula"] == "tarantula"
    assert cfg["limits"]["steps"] == 20
    assert cfg["limits"]["depth"] == DEFAULTS["limits"]["depth"]


@pytest.mark.parametrize("text", ['[fl]\nformla = "x"\n', '[nope]\na = 1\n', 'fl = 3\n', '[fl\n'])
def test_bad_files(tmp_path, text):
    path = tmp_path / "c.toml"
    path.write_text(text)
    with pytest.raises(ConfigError):
        load_config(path)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.toml")


def test_dump_round_trips():
    assert tomllib.loads(dump_defaults()) == DEFAULTS
