# services/errors.py
from __future__ import annotations


class FieldbootError(Exception):
    """Base class for every domain error raised by fieldboot."""


class ConfigError(FieldbootError, ValueError):
    pass


class PreconditionError(FieldbootError, ValueError):
    pass


class ShapeMismatchError(FieldbootError, ValueError):
    pass


class GridMismatchError(FieldbootError, ValueError):
    pass


class SpecError(FieldbootError, ValueError):
    pass


class EmptyCandidateSetError(FieldbootError, RuntimeError):
    def __init__(self, message: str = "observed image smaller than conditioning shape") -> None:
        super().__init__(message)


class EnumerationLimitError(FieldbootError, RuntimeError):
    pass


class CounterexampleError(FieldbootError, RuntimeError):
    def __init__(self, message: str = "spec does not exhibit the counterexample") -> None:
        super().__init__(message)


class PgmParseError(FieldbootError, ValueError):
    """Malformed PGM input; `offset` is the byte position where parsing stopped."""

    def __init__(self, offset: int, reason: str) -> None:
        self.offset = offset
        self.reason = reason
        super().__init__(f"pgm parse error at byte {offset}: {reason}")
