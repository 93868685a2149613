"""Run configuration: sectioned key=value files, env overrides, flag merging.

Precedence, highest first: command-line flags, environment variables
(LOGSIFT_LLM_BASE_URL, LOGSIFT_LLM_MODEL, LOGSIFT_LLM_TOKEN), config file,
built-in defaults. The file format is INI-style so batch environments can
template it without extra tooling.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass

from .errors import UsageError
from .generation import LlmEndpointConfig

ENV_BASE_URL = "LOGSIFT_LLM_BASE_URL"
ENV_MODEL = "LOGSIFT_LLM_MODEL"
ENV_TOKEN = "LOGSIFT_LLM_TOKEN"


@dataclass
class LlmSettings:
    base_url: str | None = None
    model_name: str = "local-model"
    temperature: float = 0.0
    max_tokens: int = 1024
    timeout: float = 60.0
    max_concurrent_requests: int = 4
    retry_limit: int = 2
    bearer_token: str | None = None

    def resolve(self) -> LlmEndpointConfig:
        if not self.base_url:
            raise UsageError(
                "llm mode needs an endpoint: set --base-url, "
                f"{ENV_BASE_URL}, or [llm] base_url in the config file"
            )
        return LlmEndpointConfig(
            base_url=self.base_url,
            model_name=self.model_name,
            temperature=self.temperature,
            max_tokens=self.max_tokens,
            timeout=self.timeout,
            max_concurrent_requests=self.max_concurrent_requests,
            retry_limit=self.retry_limit,
            bearer_token=self.bearer_token,
        )


def load_llm_settings(config_path: str | None = None) -> LlmSettings:
    """Settings from file (if given) with environment overrides applied."""
    settings = LlmSettings()
    if config_path:
        parser = configparser.ConfigParser()
        read = parser.read(config_path)
        if not read:
            raise UsageError(f"cannot read config file: {config_path}")
        if parser.has_section("llm"):
            section = parser["llm"]
            settings.base_url = section.get("base_url", settings.base_url)
            settings.model_name = section.get("model_name", settings.model_name)
            settings.temperature = section.getfloat("temperature", settings.temperature)
            settings.max_tokens = section.getint("max_tokens", settings.max_tokens)
            settings.timeout = section.getfloat("timeout", settings.timeout)
            settings.max_concurrent_requests = section.getint(
                "max_concurrent_requests", settings.max_concurrent_requests
            )
            settings.retry_limit = section.getint("retry_limit", settings.retry_limit)
            settings.bearer_token = section.get("bearer_token", settings.bearer_token)
    if os.environ.get(ENV_BASE_URL):
        settings.base_url = os.environ[ENV_BASE_URL]
    if os.environ.get(ENV_MODEL):
        settings.model_name = os.environ[ENV_MODEL]
    if os.environ.get(ENV_TOKEN):
        settings.bearer_token = os.environ[ENV_TOKEN]
    return settings
