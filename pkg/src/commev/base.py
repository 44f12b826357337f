"""Shared source locations and exception types."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceLoc:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class ModelError(Exception):
    """Base class for model-level failures."""

    def __init__(self, message: str, loc: SourceLoc | None = None):
        self.loc = loc
        super().__init__(f"{loc}: {message}" if loc else message)


class ParseError(ModelError):
    """Malformed concrete syntax."""


class StructureError(ModelError):
    """Syntactically valid input violating a structural rule."""


class DuplicateDefinition(ModelError):
    """The same element is fully defined more than once across sources."""


class CyclicResidue(ModelError):
    """The precedence graph stays cyclic after loopback classification."""


class UnknownEvent(ModelError):
    """An operation referenced an event id that does not exist."""
