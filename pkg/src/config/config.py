"""
Main configuration management for reflectsim.

Handles environment-based settings (log level and format, output directory)
and provides a cached configuration instance.
"""

from functools import lru_cache
from pathlib import Path
from typing import Any, Dict

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
LOG_FORMATS = ("json", "console")
ENVIRONMENTS = ("dev", "test", "prod")


class AppSettings(BaseSettings):
    """Process-wide settings read from ``REFLECTSIM_*`` environment variables or ``.env``."""

    model_config = SettingsConfigDict(
        env_prefix="REFLECTSIM_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    environment: str = Field(default="dev")
    log_level: str = Field(default="INFO")
    log_format: str = Field(default="json")
    output_dir: Path = Field(default=Path("results"))

    @field_validator("environment")
    @classmethod
    def validate_environment(cls, v: str) -> str:
        if v not in ENVIRONMENTS:
            raise ValueError(f"Environment must be one of: {list(ENVIRONMENTS)}")
        return v

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        if v.upper() not in LOG_LEVELS:
            raise ValueError(f"Log level must be one of: {list(LOG_LEVELS)}")
        return v.upper()

    @field_validator("log_format")
    @classmethod
    def validate_log_format(cls, v: str) -> str:
        if v.lower() not in LOG_FORMATS:
            raise ValueError(f"Log format must be one of: {list(LOG_FORMATS)}")
        return v.lower()


@lru_cache()
def get_config() -> AppSettings:
    """Get cached configuration instance."""
    return AppSettings()


def get_environment_config() -> Dict[str, Any]:
    """Settings with the per-environment logging defaults applied."""
    config = get_config()
    base_config: Dict[str, Any] = {
        "environment": config.environment,
        "log_level": config.log_level,
        "log_format": config.log_format,
        "output_dir": config.output_dir,
    }

    # Production runs never emit per-message debug output.
    if config.environment == "prod" and config.log_level == "DEBUG":
        base_config["log_level"] = "INFO"

    return base_config
