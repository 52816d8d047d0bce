"""Exception hierarchy shared by every countq module."""

from __future__ import annotations


class CountQError(Exception):
    """Base class for all countq errors."""


class IncompatibleScalarsError(CountQError, TypeError):
    """Two scalars live in different rings or fields."""


class RootIsolationError(CountQError, ValueError):
    """A field has no usable root-isolating interval."""


class ParseError(CountQError, ValueError):
    """Malformed input text. ``lineno`` is 1-based, or None when not line-oriented."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class TranscendentalAmplitudeError(ParseError):
    """An amplitude names a transcendental constant or function."""


class NonUnitaryError(CountQError, ValueError):
    """A gate matrix fails the exact U U^dagger = I check."""


class ResourceLimitError(CountQError):
    """A configured cap (witness bits, stored terms, vertices) was exceeded."""


class InvariantViolation(CountQError, AssertionError):
    """An internal exact identity failed. Indicates a bug, never bad input."""
