"""Exception hierarchy shared across the package.

Two broad classes matter to callers: data that fails validation or a
computation precondition (:class:`ValidationError`, CLI exit code 1) and
files that cannot be read or do not match the documented schemas
(:class:`SchemaError` and its subclasses, CLI exit code 2).
"""

from __future__ import annotations


class StormclustError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(StormclustError):
    """Input violates a documented precondition or invariant."""


class SchemaError(StormclustError):
    """A file is missing required columns/fields or declares unknown ones."""


class ParseError(SchemaError):
    """A cell could not be parsed; the message carries the file line number."""
