"""Exception hierarchy shared across the pipeline.

The CLI maps these onto BSD-style exit codes: usage errors 64, data errors
65, I/O errors 74.
"""

from __future__ import annotations


class VulnpipeError(Exception):
    """Base class for all pipeline errors."""


class DataError(VulnpipeError):
    """Invalid input data (bad report, bad CSV, contract violation)."""


class ConfigError(VulnpipeError):
    """Invalid configuration file or option combination."""


class ReportParseError(DataError):
    """A static-analyzer report could not be parsed."""


class DiffParseError(DataError):
    """A unified diff could not be parsed."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class ScoringError(VulnpipeError):
    """Base class for scorer-backend failures."""


class ScorerTransportError(ScoringError):
    """The scoring backend could not be reached (network layer)."""


class ScorerProtocolError(ScoringError):
    """The scoring backend replied, but violated the protocol."""
