"""
Configuration management for the modular ASP toolkit.
"""

import os
import yaml
from typing import Optional, Any
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from .models import OutputFormat, Strategy


class SolverConfig(BaseSettings):
    """Solver configuration; reads MASP_ prefixed environment variables."""

    model_config = SettingsConfigDict(env_prefix="MASP_", extra="allow")

    strategy: Strategy = Strategy.SPLITTING
    max_branch: int = Field(1_000_000, ge=1, description="Cap on candidate subsets per def-module")
    jobs: int = Field(1, ge=1, description="Worker threads for partitioned enumeration")
    naive_limit: int = Field(24, ge=1, description="Cap on ground atoms searched by the naive oracle")


class EquivalenceConfig(BaseSettings):
    """Equivalence checking configuration."""

    model_config = SettingsConfigDict(extra="allow")

    default_bound: int = Field(0, ge=0, description="Fresh constants added when no bound is given")
    chunk_size: int = Field(256, ge=1, description="Interpretations per worker task")


class OutputConfig(BaseSettings):
    """Output configuration."""

    model_config = SettingsConfigDict(extra="allow")

    format: OutputFormat = OutputFormat.TEXT


class LoggingConfig(BaseSettings):
    """Logging configuration."""

    model_config = SettingsConfigDict(extra="allow")

    level: str = "WARNING"
    format: str = "console"
    file: Optional[str] = None
    max_size_mb: int = 10
    backup_count: int = 3


class Config(BaseSettings):
    """Main toolkit configuration."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="allow"  # Allow extra fields from YAML
    )

    solver: SolverConfig = Field(default_factory=SolverConfig)
    equivalence: EquivalenceConfig = Field(default_factory=EquivalenceConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    @classmethod
    def from_yaml(cls, config_path: str) -> "Config":
        """Load configuration from YAML file."""
        if not os.path.exists(config_path):
            raise FileNotFoundError(f"Configuration file not found: {config_path}")

        with open(config_path, 'r') as f:
            config_data = yaml.safe_load(f) or {}

        # Expand environment variables
        config_data = cls._expand_env_vars(config_data)

        return cls(**config_data)

    @staticmethod
    def _expand_env_vars(obj: Any) -> Any:
        """Recursively expand environment variables in configuration."""
        if isinstance(obj, dict):
            return {key: Config._expand_env_vars(value) for key, value in obj.items()}
        elif isinstance(obj, list):
            return [Config._expand_env_vars(item) for item in obj]
        elif isinstance(obj, str):
            return os.path.expandvars(obj)
        else:
            return obj


# Global configuration instance
config: Optional[Config] = None


def get_config() -> Config:
    """Get the global configuration instance, falling back to defaults."""
    global config
    if config is None:
        config_path = os.getenv("MASP_CONFIG_PATH", "config/config.yml")
        if os.path.exists(config_path):
            config = Config.from_yaml(config_path)
        else:
            config = Config()
    return config


def set_config(new_config: Optional[Config]) -> None:
    """Set the global configuration instance."""
    global config
    config = new_config
