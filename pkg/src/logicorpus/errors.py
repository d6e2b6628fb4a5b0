"""Exception hierarchy.

Every error raised by this package derives from :class:`LogicorpusError` and
carries the name of the module that raised it, so the CLI can emit a single
machine-parseable ``error[<module>]: <message>`` line.
"""

from __future__ import annotations


class LogicorpusError(Exception):
    """Base class for all package errors."""

    module = "logicorpus"

    def tagged(self) -> str:
        return f"error[{self.module}]: {self}"


class LexiconParseError(LogicorpusError):
    """A lexicon file line did not parse."""

    module = "lexicon"


class LexiconValidationError(LogicorpusError):
    """A lexicon violated an invariant (e.g. one phrase under two categories)."""

    module = "lexicon"


class IngestError(LogicorpusError):
    """Raw input could not be ingested (bad encoding, unreadable file)."""

    module = "ingest"


class IntegrityError(LogicorpusError):
    """Inputs handed to the masker disagree with each other."""

    module = "masker"


class EmissionError(LogicorpusError):
    """Writing the output dataset failed part-way."""

    module = "masker"

    def __init__(self, message: str, written: int = 0):
        super().__init__(message)
        self.written = written


class RecordError(LogicorpusError):
    """An emitted-format record failed to parse; carries the 1-based line number."""

    module = "stats"

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NumericInputError(LogicorpusError):
    """Loss inputs were non-finite or out of range."""

    module = "loss"


class LossConfigError(LogicorpusError):
    """Loss configuration out of range (e.g. lambda outside [0, 1])."""

    module = "loss"


class PipelineConfigError(LogicorpusError):
    """Build configuration failed validation before any I/O."""

    module = "cli"
