"""Static types of the contract language.

Types are immutable values (not AST nodes): two structurally equal types
compare equal and render to the same canonical text.
"""

from __future__ import annotations

from dataclasses import dataclass

INT_WIDTHS = (8, 16, 32, 64, 128, 256)


@dataclass(frozen=True)
class BoolType:
    def render(self) -> str:
        return "bool"


@dataclass(frozen=True)
class IntType:
    width: int
    signed: bool

    def render(self) -> str:
        return ("int" if self.signed else "uint") + str(self.width)

    @property
    def min_value(self) -> int:
        return -(1 << (self.width - 1)) if self.signed else 0

    @property
    def max_value(self) -> int:
        return (1 << (self.width - 1)) - 1 if self.signed else (1 << self.width) - 1

    def wrap(self, v: int) -> int:
        """Reduce v into this type's range with two's-complement wrapping."""
        m = v & ((1 << self.width) - 1)
        if self.signed and m >= (1 << (self.width - 1)):
            m -= 1 << self.width
        return m

    def contains(self, v: int) -> bool:
        return self.min_value <= v <= self.max_value


@dataclass(frozen=True)
class AddressType:
    def render(self) -> str:
        return "address"


@dataclass(frozen=True)
class StringType:
    def render(self) -> str:
        return "string"


@dataclass(frozen=True)
class ArrayType:
    elem: "Type"

    def render(self) -> str:
        return self.elem.render() + "[]"


@dataclass(frozen=True)
class MappingType:
    key: "Type"
    value: "Type"

    def render(self) -> str:
        return f"mapping({self.key.render()} => {self.value.render()})"


Type = BoolType | IntType | AddressType | StringType | ArrayType | MappingType

BOOL = BoolType()
ADDRESS = AddressType()
STRING = StringType()


def uint(width: int = 64) -> IntType:
    return IntType(width, signed=False)


def sint(width: int = 64) -> IntType:
    return IntType(width, signed=True)


def contains_mapping(t: Type) -> bool:
    if isinstance(t, MappingType):
        return True
    if isinstance(t, ArrayType):
        return contains_mapping(t.elem)
    return False


def default_value_kind(t: Type) -> str:
    """Storage default for a freshly declared variable of type t."""
    if isinstance(t, IntType):
        return "0"
    if isinstance(t, BoolType):
        return "false"
    if isinstance(t, StringType):
        return '""'
    if isinstance(t, AddressType):
        return "address(0)"
    if isinstance(t, ArrayType):
        return "[]"
    raise ValueError(f"no default value for {t.render()}")
