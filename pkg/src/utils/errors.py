"""Error hierarchy shared by every package."""

from pathlib import Path
from typing import Optional


class ACSError(Exception):
    """Base class for all errors raised by this project."""

    def one_line(self) -> str:
        """Machine-parsable single-line rendering used on CLI failure."""
        message = " ".join(str(self).split())
        return f"error={type(self).__name__} message={message}"


class DimensionError(ACSError, ValueError):
    """Array shapes or vector lengths do not agree."""


class ConfigurationError(ACSError, ValueError):
    """A configuration value is invalid."""


class StateError(ACSError, RuntimeError):
    """An object is used before it is ready (uncalibrated, stale, missing state)."""


class InputError(ACSError, ValueError):
    """Caller-supplied data is inconsistent (unknown ids, missing scores, ...)."""


class FormatError(InputError):
    """A binary or text file does not match its declared format."""

    def __init__(self, message: str, offset: Optional[int] = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)


class RunError(ACSError, RuntimeError):
    """Training diverged or a run could not complete."""

    def __init__(self, message: str, checkpoint: Optional[Path] = None):
        self.checkpoint = checkpoint
        if checkpoint is not None:
            message = f"{message}; last good checkpoint: {checkpoint}"
        super().__init__(message)
