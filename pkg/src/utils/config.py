"""Configuration management using Pydantic settings."""

from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Output locations
    output_dir: str = "runs"
    data_dir: str = "data"

    # Progress printing for loaders, trainers and scripts
    verbose: bool = True

    # Number of worker processes a sweep may fan out to
    sweep_workers: int = 1

    checkpoint_suffix: str = ".npz"

    model_config = SettingsConfigDict(
        env_prefix="ACS_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
    )


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
