"""Exception hierarchy, mirroring the corpus toolkit's tagged single-line style."""

from __future__ import annotations


class ToytrainError(Exception):
    """Base class for all trainer errors."""

    module = "toytrain"

    def tagged(self) -> str:
        return f"error[{self.module}]: {self}"


class DataError(ToytrainError):
    """A dataset record failed to parse or violated format integrity."""


class ConfigError(ToytrainError):
    """Training configuration failed validation."""


class TrainingError(ToytrainError):
    """Training diverged; carries the offending step."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class ExportError(ToytrainError):
    """Model outputs and labels disagree in shape or position."""


class OracleError(ToytrainError):
    """The external loss evaluator failed or disagreed beyond tolerance."""
