"""Utilities package."""

from .config import Settings, get_settings
from .errors import (
    ACSError,
    ConfigurationError,
    DimensionError,
    FormatError,
    InputError,
    RunError,
    StateError,
)
from .seeding import Stream, derive_seed, rng_for

__all__ = [
    "Settings",
    "get_settings",
    "ACSError",
    "ConfigurationError",
    "DimensionError",
    "FormatError",
    "InputError",
    "RunError",
    "StateError",
    "Stream",
    "derive_seed",
    "rng_for",
]
