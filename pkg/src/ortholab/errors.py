"""Exception hierarchy shared by all modules.

The CLI maps ValidationError (and subclasses) to exit code 2 and
ResourceLimitError to exit code 3.
"""


class OrtholabError(Exception):
    """Base class for all library errors."""


class ValidationError(OrtholabError, ValueError):
    """Input violates a documented precondition or type invariant."""


class BoundsError(ValidationError):
    """An index, cutoff or lag reaches outside the available data."""


class ParseError(ValidationError):
    """A file could not be parsed; carries the offending line number."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class ResourceLimitError(OrtholabError, RuntimeError):
    """A configured resource cap (memory budget, block-count cap) was hit."""
