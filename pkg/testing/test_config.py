import pytest

from contract_market.config import (
    CONFIG_ENV_VAR,
    DEFAULT_ORACLE_CAP,
    DEFAULT_VERIFIER_CAP,
    EngineConfig,
    load_config,
    substitute_env,
)
from contract_market.errors import InputError


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in (CONFIG_ENV_VAR, "MARKET_ENGINE_LOG_LEVEL", "MARKET_ENGINE_VERIFIER_CAP", "MARKET_ENGINE_ORACLE_CAP"):
        monkeypatch.delenv(name, raising=False)


def test_defaults():
    config = EngineConfig()
    assert config.limits.verifier_cap == DEFAULT_VERIFIER_CAP
    assert config.limits.oracle_cap == DEFAULT_ORACLE_CAP
    assert config.limits.da_step_cap is None
    assert config.defaults.strategy == "full"


def test_explicit_file(config_file):
    config = load_config(str(config_file))
    assert config.logging.level == "DEBUG"
    assert config.source == str(config_file)
    assert config.log_path().name == "engine.log"


def test_env_var_selects_file(config_file, monkeypatch):
    monkeypatch.setenv(CONFIG_ENV_VAR, str(config_file))
    assert load_config().source == str(config_file)


def test_missing_explicit_file(tmp_path):
    with pytest.raises(InputError):
        load_config(str(tmp_path / "nope.json"))


def test_placeholders_are_substituted(tmp_path, monkeypatch):
    monkeypatch.setenv("ENGINE_TEST_CAP", "9")
    path = tmp_path / "config.json"
    path.write_text('{"limits": {"oracle_cap": ${ENGINE_TEST_CAP}}}', encoding="utf-8")
    assert load_config(str(path)).limits.oracle_cap == 9


def test_unknown_placeholder_is_left_alone():
    assert substitute_env("${SURELY_NOT_SET_ANYWHERE}") == "${SURELY_NOT_SET_ANYWHERE}"


def test_env_overrides(config_file, monkeypatch):
    monkeypatch.setenv("MARKET_ENGINE_LOG_LEVEL", "warning")
    monkeypatch.setenv("MARKET_ENGINE_ORACLE_CAP", "10")
    config = load_config(str(config_file))
    assert config.logging.level == "WARNING"
    assert config.limits.oracle_cap == 10


def test_bad_override(config_file, monkeypatch):
    monkeypatch.setenv("MARKET_ENGINE_VERIFIER_CAP", "lots")
    with pytest.raises(InputError) as info:
        load_config(str(config_file))
    assert info.value.location == "MARKET_ENGINE_VERIFIER_CAP"


def test_invalid_values_name_the_field(tmp_path):
    path = tmp_path / "config.json"
    path.write_text('{"defaults": {"strategy": "greedy"}}', encoding="utf-8")
    with pytest.raises(InputError) as info:
        load_config(str(path))
    assert info.value.location.endswith("defaults.strategy")


def test_json_errors_are_located(tmp_path):
    path = tmp_path / "config.json"
    path.write_text('{"limits": }', encoding="utf-8")
    with pytest.raises(InputError) as info:
        load_config(str(path))
    assert info.value.location == f"{path}:1:12"
