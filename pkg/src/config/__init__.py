"""
Configuration management for reflectsim.

This module handles environment-based settings, structured logging setup
and the scenario configuration files consumed by the command-line runner.
"""

from .config import AppSettings, get_config, get_environment_config
from .logging_config import LoggingConfig, configure_logging
from .scenario_config import (
    SCENARIO_NAMES,
    OutputPaths,
    ScenarioConfig,
    TopologyParams,
    apply_overrides,
    build_scenario_config,
    load_scenario_config,
    read_config_file,
)

__all__ = [
    "AppSettings",
    "get_config",
    "get_environment_config",
    "LoggingConfig",
    "configure_logging",
    "SCENARIO_NAMES",
    "OutputPaths",
    "ScenarioConfig",
    "TopologyParams",
    "apply_overrides",
    "build_scenario_config",
    "load_scenario_config",
    "read_config_file",
]
