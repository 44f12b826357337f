"""Diagnostic records and the published code table.

Every finding produced by the toolkit carries a code from CODE_TABLE.
Codes are grouped by prefix: C (metamodel constraints), S (message
structure / stage checks), U (unity criteria), G (guidelines),
P (diagram partitioning), T (event specification templates),
D (class-model derivation), X (graph analysis).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .base import SourceLoc


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"

    def __str__(self) -> str:
        return self.value


_RANK = {Severity.ERROR: 0, Severity.WARNING: 1, Severity.INFO: 2}


def severity_rank(severity: Severity) -> int:
    return _RANK[severity]


# code -> (default severity, short title)
CODE_TABLE: dict[str, tuple[Severity, str]] = {
    "CA-C01": (Severity.ERROR, "start node has incoming precedence relations"),
    "CA-C02": (Severity.ERROR, "end node has outgoing precedence relations"),
    "CA-C03": (Severity.ERROR, "and node arity is invalid"),
    "CA-C04": (Severity.ERROR, "or node arity is invalid"),
    "CA-C05": (Severity.ERROR, "duplicate event number within a process"),
    "CA-C06": (Severity.ERROR, "duplicate variant number within a parent"),
    "CA-C07": (Severity.ERROR, "formula bound to the wrong acquisition role"),
    "CA-C08": (Severity.ERROR, "initial substructure is a specialisation"),
    "CA-C09": (Severity.ERROR, "field repeated within an aggregation"),
    "CA-C10": (Severity.ERROR, "aggregation name repeated among siblings"),
    "CA-C11": (Severity.ERROR, "specialisation name repeated among siblings"),
    "CA-S01": (Severity.WARNING, "field property not recommended at this stage"),
    "CA-S02": (Severity.ERROR, "formula references an unknown field"),
    "CA-U01": (Severity.ERROR, "event lacks a primary role"),
    "CA-U02": (Severity.WARNING, "message missing or conveys no input fields"),
    "CA-U03": (Severity.INFO, "no outgoing interaction and empty template reaction"),
    "CA-G01": (Severity.INFO, "event name does not follow the nomination pattern"),
    "CA-G02": (Severity.WARNING, "all event variants lead to identical successors"),
    "CA-G03": (Severity.WARNING, "diagram exceeds the element budget"),
    "CA-G04": (Severity.WARNING, "ingoing interaction label differs from message name"),
    "CA-P01": (Severity.ERROR, "direct precedent not referenced in diagram"),
    "CA-P02": (Severity.ERROR, "out-of-scope reference is never defined"),
    "CA-P03": (Severity.INFO, "direct successor not referenced in diagram"),
    "CA-T01": (Severity.ERROR, "template event id cannot be resolved"),
    "CA-T02": (Severity.WARNING, "template primary actor differs from the model"),
    "CA-T03": (Severity.WARNING, "field descriptions inconsistent with the structure"),
    "CA-T04": (Severity.INFO, "linked communications omit an outgoing interaction"),
    "CA-D01": (Severity.WARNING, "reference domain not found in the registry"),
    "CA-D02": (Severity.WARNING, "conflicting attribute domains on integration"),
    "CA-X01": (Severity.INFO, "node unreachable from any start node"),
    "CA-X02": (Severity.ERROR, "precedence residue contains a cycle"),
    "CA-X03": (Severity.INFO, "precedence between two out-of-scope references"),
}


@dataclass(frozen=True)
class Diagnostic:
    code: str
    severity: Severity
    message: str
    loc: SourceLoc
    element: str | None = None

    def __post_init__(self) -> None:
        if self.code not in CODE_TABLE:
            raise ValueError(f"unknown diagnostic code {self.code}")
        if not self.message:
            raise ValueError("diagnostic message must be non-empty")

    @property
    def sort_key(self) -> tuple:
        return (
            self.loc.file,
            self.loc.line,
            self.loc.column,
            self.code,
            self.element or "",
            self.message,
        )

    def as_dict(self) -> dict:
        return {
            "code": self.code,
            "severity": str(self.severity),
            "message": self.message,
            "file": self.loc.file,
            "line": self.loc.line,
            "column": self.loc.column,
            "element": self.element,
        }

    def render(self) -> str:
        tail = f" [{self.element}]" if self.element else ""
        return f"{self.loc}: {self.severity}: {self.code}: {self.message}{tail}"


def make(code: str, message: str, loc: SourceLoc, element: str | None = None) -> Diagnostic:
    """Create a diagnostic with the code's default severity."""
    return Diagnostic(code, CODE_TABLE[code][0], message, loc, element)
