"""Command-line layer: validated run configs and the four subcommands."""
from .config import CONFIG_SCHEMA, ConfigError, RunConfig, build_provider, load_config
from .main import cmd_cliff, cmd_coldstart, cmd_optimize, cmd_predict, main

__all__ = [
    "CONFIG_SCHEMA",
    "ConfigError",
    "RunConfig",
    "build_provider",
    "cmd_cliff",
    "cmd_coldstart",
    "cmd_optimize",
    "cmd_predict",
    "load_config",
    "main",
]
