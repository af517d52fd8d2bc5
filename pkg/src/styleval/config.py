"""Run configuration: JSON file plus command-line overrides.

The API key is never stored in the file; it is read from the
environment variable named by ``api_key_env``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .errors import ConfigError
from .pipeline import ALL_SYSTEMS
from .providers import ChatClient, ChatEndpointConfig, ScorerClient, ScorerConfig

DEFAULT_API_KEY_ENV = "STYLEVAL_API_KEY"


@dataclass
class EndpointSettings:
    base_url: str = ""
    model: str = ""
    api_key_env: str = DEFAULT_API_KEY_ENV
    api_key_header: str = "Authorization"
    cache_dir: str | None = None
    max_attempts: int = 3
    backoff_base: float = 1.0
    timeout: float = 120.0
    concurrency: int = 4
    max_new_tokens: int = 1024


@dataclass
class SidecarSettings:
    base_url: str | None = None
    timeout: float = 30.0
    max_attempts: int = 3
    backoff_base: float = 0.5


@dataclass
class RunConfig:
    endpoint: EndpointSettings = field(default_factory=EndpointSettings)
    sidecar: SidecarSettings = field(default_factory=SidecarSettings)
    seed: int = 0
    systems: list[str] = field(default_factory=lambda: list(ALL_SYSTEMS))


def _apply_section(target, data: dict, section: str) -> None:
    for key, value in data.items():
        if not hasattr(target, key):
            raise ConfigError(f"unknown key {section}.{key}")
        setattr(target, key, value)


def load_run_config(path: str | None = None, overrides: dict | None = None) -> RunConfig:
    """Build a RunConfig from an optional JSON file and flag overrides.

    Overrides use dotted keys (``endpoint.model``, ``seed``); flags win
    over the file, the file wins over defaults.
    """
    config = RunConfig()
    if path is not None:
        try:
            with open(path, encoding="utf-8") as handle:
                data = json.load(handle)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except ValueError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must be a JSON object")
        for section, payload in data.items():
            if section == "endpoint":
                _apply_section(config.endpoint, payload, "endpoint")
            elif section == "sidecar":
                _apply_section(config.sidecar, payload, "sidecar")
            elif section == "seed":
                config.seed = int(payload)
            elif section == "systems":
                config.systems = list(payload)
            else:
                raise ConfigError(f"unknown config section {section!r}")
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key.startswith("endpoint."):
            _apply_section(config.endpoint, {key.split(".", 1)[1]: value}, "endpoint")
        elif key.startswith("sidecar."):
            _apply_section(config.sidecar, {key.split(".", 1)[1]: value}, "sidecar")
        elif key == "seed":
            config.seed = int(value)
        elif key == "systems":
            config.systems = list(value)
        else:
            raise ConfigError(f"unknown override {key!r}")
    for system in config.systems:
        if system not in ALL_SYSTEMS:
            raise ConfigError(f"unknown system {system!r} in config")
    return config


def make_chat_client(config: RunConfig) -> ChatClient | None:
    settings = config.endpoint
    if not settings.base_url:
        return None
    if not settings.model:
        raise ConfigError("endpoint.model is required when endpoint.base_url is set")
    api_key = os.environ.get(settings.api_key_env) or None
    endpoint = ChatEndpointConfig(
        base_url=settings.base_url,
        model=settings.model,
        api_key_header=settings.api_key_header,
        api_key=api_key,
        cache_dir=settings.cache_dir,
        max_attempts=settings.max_attempts,
        backoff_base=settings.backoff_base,
        timeout=settings.timeout,
        concurrency=settings.concurrency,
    )
    return ChatClient(endpoint)


def make_scorer_client(config: RunConfig) -> ScorerClient | None:
    settings = config.sidecar
    if not settings.base_url:
        return None
    return ScorerClient(
        ScorerConfig(
            base_url=settings.base_url,
            timeout=settings.timeout,
            max_attempts=settings.max_attempts,
            backoff_base=settings.backoff_base,
        )
    )
