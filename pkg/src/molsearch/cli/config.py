"""Run configuration: one versioned JSON document per reproducible run.

Everything a command needs — task shape, search budget, provider choice,
input paths, output root, and the seed — lives in one file so a run can be
re-executed from it alone.  Secrets never appear here: remote credentials
come exclusively from the environment, and a config that tries to embed
one is rejected outright.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..policy import (
    HeuristicProvider,
    PolicyProvider,
    RemoteConfig,
    RemoteProvider,
    ScriptedProvider,
)

__all__ = ["CONFIG_SCHEMA", "ConfigError", "RunConfig", "load_config", "build_provider"]

CONFIG_SCHEMA = "molsearch-config/1"

PROVIDER_NAMES = ("scripted", "heuristic", "remote")

# Key names that smell like embedded credentials; configs carrying any of
# these are refused so tokens stay in the environment where they belong.
FORBIDDEN_PROVIDER_KEYS = ("api_key", "apikey", "token", "secret", "password", "key")


class ConfigError(ValueError):
    """The config document is malformed or references missing inputs."""


@dataclass(frozen=True)
class RunConfig:
    """Validated run settings; all referenced input paths exist."""

    seed: int
    task: dict
    search: dict = field(default_factory=dict)
    provider: dict = field(default_factory=lambda: {"name": "heuristic"})
    ruleset: Optional[Path] = None
    dataset: Optional[Path] = None
    out: Path = Path("runs")

    def as_dict(self) -> dict:
        return {
            "schema": CONFIG_SCHEMA,
            "seed": self.seed,
            "task": dict(self.task),
            "search": dict(self.search),
            "provider": dict(self.provider),
            "ruleset": str(self.ruleset) if self.ruleset else None,
            "dataset": str(self.dataset) if self.dataset else None,
            "out": str(self.out),
        }


def _require_path(raw, what: str) -> Path:
    path = Path(raw)
    if not path.exists():
        raise ConfigError(f"{what} path does not exist: {path}")
    return path


def load_config(
    path,
    *,
    seed: Optional[int] = None,
    provider: Optional[str] = None,
    out: Optional[str] = None,
) -> RunConfig:
    """Read and validate a config file; keyword arguments are the flag
    overrides and replace the file's values before validation."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file does not exist: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    if doc.get("schema") != CONFIG_SCHEMA:
        raise ConfigError(
            f"unsupported config schema {doc.get('schema')!r}; "
            f"expected {CONFIG_SCHEMA!r}"
        )

    if seed is not None:
        doc["seed"] = seed
    if provider is not None:
        doc.setdefault("provider", {})
        doc["provider"] = {**doc["provider"], "name": provider}
    if out is not None:
        doc["out"] = out

    if "seed" not in doc:
        raise ConfigError("config must declare a seed; implicit randomness is not allowed")
    if not isinstance(doc["seed"], int) or isinstance(doc["seed"], bool):
        raise ConfigError(f"seed must be an integer, got {doc['seed']!r}")

    task = doc.get("task")
    if not isinstance(task, dict) or "kind" not in task:
        raise ConfigError("config must carry a task object with a kind")

    search = doc.get("search", {})
    if not isinstance(search, dict):
        raise ConfigError("search settings must be an object")

    provider_cfg = doc.get("provider", {"name": "heuristic"})
    if not isinstance(provider_cfg, dict):
        raise ConfigError("provider settings must be an object")
    name = provider_cfg.get("name")
    if name not in PROVIDER_NAMES:
        raise ConfigError(
            f"provider name must be one of {PROVIDER_NAMES}, got {name!r}"
        )
    leaked = [k for k in provider_cfg if k.lower() in FORBIDDEN_PROVIDER_KEYS]
    if leaked:
        raise ConfigError(
            f"provider config must not embed credentials ({leaked[0]!r}); "
            "export them in the environment instead"
        )
    if name == "scripted":
        if "script" not in provider_cfg:
            raise ConfigError("scripted provider needs a script path")
        _require_path(provider_cfg["script"], "script")
    if name == "remote":
        for required in ("endpoint", "model"):
            if required not in provider_cfg:
                raise ConfigError(f"remote provider needs an {required}")

    ruleset = doc.get("ruleset")
    dataset = doc.get("dataset")
    return RunConfig(
        seed=doc["seed"],
        task=task,
        search=search,
        provider=provider_cfg,
        ruleset=_require_path(ruleset, "ruleset") if ruleset else None,
        dataset=_require_path(dataset, "dataset") if dataset else None,
        out=Path(doc.get("out", "runs")),
    )


def build_provider(config: RunConfig) -> PolicyProvider:
    settings = config.provider
    name = settings["name"]
    if name == "heuristic":
        return HeuristicProvider()
    if name == "scripted":
        return ScriptedProvider.from_file(settings["script"])
    remote = RemoteConfig(
        endpoint=settings["endpoint"],
        model=settings["model"],
        timeout=float(settings.get("timeout", 30.0)),
        auth_env=settings.get("auth_env", "MOLSEARCH_API_KEY"),
        sampling=tuple((k, v) for k, v in settings.get("sampling", {}).items()),
    )
    return RemoteProvider(remote)
