"""Exception types raised across the pipeline.

Each leaf class maps to one CLI exit code (see ``outbreakmon.cli``), so
library callers and the command-line front end agree on failure taxonomy.
"""


class PipelineError(Exception):
    """Base class for all errors this package raises on bad input or state."""


class ParseError(PipelineError):
    """An input line or file could not be parsed.

    Carries the offending line number (1-based) when known, so batch loaders
    can point at the exact record.
    """

    def __init__(self, reason: str, line_no: int | None = None):
        self.reason = reason
        self.line_no = line_no
        prefix = f"line {line_no}: " if line_no is not None else ""
        super().__init__(f"{prefix}{reason}")


class TrainingDataError(PipelineError):
    """Labeled data unusable for training (empty set, single class)."""


class ModelFileError(PipelineError):
    """Model file is corrupt, wrong version, or internally inconsistent."""


class TimelineError(PipelineError):
    """Event timeline is malformed or fails validation."""
