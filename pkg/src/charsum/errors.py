"""Exception types with fixed CLI exit codes."""

from __future__ import annotations


class SchemaError(ValueError):
    """Malformed job input: unknown kind, missing field, out-of-range value."""

    exit_code = 2


class SizeBoundError(RuntimeError):
    """A requested computation exceeds a configured size bound."""

    exit_code = 3


class InternalCheckError(AssertionError):
    """An internal cross-check failed; indicates a bug, not bad input."""

    exit_code = 4
