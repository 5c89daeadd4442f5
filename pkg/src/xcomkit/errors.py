"""Diagnostics shared by every pipeline.

Errors never carry host values; they hold a message and, where known, the
source location of the construct that failed.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Loc:
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


class XComError(Exception):
    kind = "error"

    def __init__(self, message: str, loc: Loc | None = None):
        super().__init__(message)
        self.message = message
        self.loc = loc

    def __str__(self) -> str:
        if self.loc is None:
            return f"{self.kind}: {self.message}"
        return f"{self.kind} at {self.loc}: {self.message}"


class ParseError(XComError):
    kind = "syntax error"


class StaticError(XComError):
    """Rejected before execution (translation or compilation time)."""

    kind = "static error"


class EvalError(XComError):
    """Raised while a program runs, by any of the execution paths."""

    kind = "runtime error"


class MachineError(XComError):
    kind = "machine error"


class Diverged(MachineError):
    """A machine ran past its step budget."""

    kind = "diverged"
