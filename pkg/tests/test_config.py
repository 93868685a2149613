import pytest

from logsift.config import ENV_BASE_URL, ENV_MODEL, ENV_TOKEN, load_llm_settings
from logsift.errors import UsageError


CONFIG_TEXT = """
[llm]
base_url = http://files.example:8000/v1
model_name = filed-model
temperature = 0.0
max_tokens = 256
timeout = 12.5
max_concurrent_requests = 2
retry_limit = 1
"""


def test_file_values_loaded(tmp_path, monkeypatch):
    for var in (ENV_BASE_URL, ENV_MODEL, ENV_TOKEN):
        monkeypatch.delenv(var, raising=False)
    path = tmp_path / "logsift.ini"
    path.write_text(CONFIG_TEXT, encoding="utf-8")
    settings = load_llm_settings(str(path))
    assert settings.base_url == "http://files.example:8000/v1"
    assert settings.model_name == "filed-model"
    assert settings.max_tokens == 256
    assert settings.timeout == 12.5
    cfg = settings.resolve()
    assert cfg.max_concurrent_requests == 2
    assert cfg.retry_limit == 1


def test_env_overrides_file(tmp_path, monkeypatch):
    path = tmp_path / "logsift.ini"
    path.write_text(CONFIG_TEXT, encoding="utf-8")
    monkeypatch.setenv(ENV_BASE_URL, "http://env.example:9000/v1")
    monkeypatch.setenv(ENV_MODEL, "env-model")
    monkeypatch.setenv(ENV_TOKEN, "tok123")
    settings = load_llm_settings(str(path))
    assert settings.base_url == "http://env.example:9000/v1"
    assert settings.model_name == "env-model"
    assert settings.bearer_token == "tok123"


def test_no_endpoint_is_usage_error(monkeypatch):
    for var in (ENV_BASE_URL, ENV_MODEL, ENV_TOKEN):
        monkeypatch.delenv(var, raising=False)
    with pytest.raises(UsageError):
        load_llm_settings(None).resolve()


def test_missing_config_file(monkeypatch):
    monkeypatch.delenv(ENV_BASE_URL, raising=False)
    with pytest.raises(UsageError):
        load_llm_settings("/nonexistent/logsift.ini")
