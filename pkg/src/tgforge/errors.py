"""Exception hierarchy shared across the package.

CLI exit-code mapping: ParseError / IntegrityError / InputError are user
input problems (exit 1); anything else escaping a command is an internal
failure (exit 2).
"""

from __future__ import annotations


class TGForgeError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"


class ParseError(TGForgeError):
    """Malformed graph or layout document (syntax level)."""

    code = "parse"

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class IntegrityError(TGForgeError):
    """Structurally invalid graph: duplicate ids, dangling references."""

    def __init__(self, message: str, code: str, offending_id: str | None = None):
        super().__init__(message)
        self.code = code
        self.offending_id = offending_id


class InputError(TGForgeError):
    """Invalid argument to an operation (unknown node/kind, bad range)."""

    code = "input"


class EngineError(TGForgeError):
    """Numerical invariant violated inside the layout engine (a bug trap,
    not a recoverable input condition)."""

    code = "engine"
