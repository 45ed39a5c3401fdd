"""Errors raised by the language front end."""

from __future__ import annotations

from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from .nodes import SourcePos


class LangError(Exception):
    """Base for parse and type errors; carries a source position."""

    def __init__(self, message: str, pos: Optional["SourcePos"] = None):
        self.message = message
        self.pos = pos
        where = f" at {pos}" if pos is not None else ""
        super().__init__(message + where)


class ParseError(LangError):
    def __init__(self, message: str, pos=None, expected: tuple[str, ...] = ()):
        self.expected = expected
        if expected:
            message = f"{message} (expected one of: {', '.join(expected)})"
        super().__init__(message, pos)


class TypeCheckError(LangError):
    pass
