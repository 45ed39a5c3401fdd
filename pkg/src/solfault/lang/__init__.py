"""Contract language front end: lexer, parser, checker, printer, transforms."""

from .errors import LangError, ParseError, TypeCheckError
from .nodes import renumber, structurally_equal, structure, walk
from .parser import parse
from .printer import print_contract
from .transform import count_asserts, count_requires, strip_requires
from .typecheck import CheckedContract, check

__all__ = [
    "LangError", "ParseError", "TypeCheckError",
    "parse", "print_contract", "check", "CheckedContract",
    "strip_requires", "count_requires", "count_asserts",
    "walk", "renumber", "structure", "structurally_equal",
]
