"""Exception hierarchy and source spans shared across the package."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    """Location of a token or region in query/expression text."""

    line: int
    column: int
    start: int
    end: int

    def __post_init__(self) -> None:
        if self.end < self.start:
            raise ValueError("span end before start")

    def describe(self) -> str:
        return f"line {self.line}, column {self.column}"


class FpqError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(FpqError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{message} ({span.describe()})")
        self.message = message
        self.span = span


class QueryValidationError(FpqError):
    pass


class GraphFormatError(FpqError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class RelationFormatError(FpqError):
    pass


class UnknownRelationError(FpqError):
    pass


class ArityMismatchError(FpqError):
    pass


class UnsupportedConstructError(FpqError):
    pass


class NotAPathError(FpqError):
    pass


class DomainBoundExceededError(FpqError):
    pass
