"""AST node definitions.

Every node carries a NodeId (dense preorder integers, assigned by
``renumber``) and a SourcePos (set by the parser; synthesized nodes inherit
the position of the node they replace). Node identity is object identity;
structural comparison goes through ``structure`` which ignores ids and
positions.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, fields
from typing import Iterator, Optional, Union

from .types import Type


@dataclass(frozen=True)
class SourcePos:
    line: int
    column: int
    offset: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class Node:
    """Base for all AST nodes; id and position live outside the dataclass fields."""

    node_id: int = -1
    pos: Optional[SourcePos] = None

    def children(self) -> list["Node"]:
        out: list[Node] = []
        for f in fields(self):  # type: ignore[arg-type]
            v = getattr(self, f.name)
            if isinstance(v, Node):
                out.append(v)
            elif isinstance(v, list):
                out.extend(x for x in v if isinstance(x, Node))
        return out


# ── expressions ──────────────────────────────────────────────────────────


@dataclass(eq=False)
class Literal(Node):
    kind: str  # "int" | "bool" | "string"
    value: object


@dataclass(eq=False)
class ArrayLit(Node):
    elements: list["Expr"]


@dataclass(eq=False)
class Ident(Node):
    name: str


@dataclass(eq=False)
class Index(Node):
    base: "Expr"
    index: "Expr"


@dataclass(eq=False)
class Member(Node):
    base: "Expr"
    name: str  # only "length" in the subset


@dataclass(eq=False)
class MsgSender(Node):
    pass


@dataclass(eq=False)
class MsgValue(Node):
    pass


@dataclass(eq=False)
class ZeroAddress(Node):
    pass


@dataclass(eq=False)
class Unary(Node):
    op: str  # "!" | "-"
    operand: "Expr"


@dataclass(eq=False)
class Binary(Node):
    op: str  # arithmetic, comparison, logical
    left: "Expr"
    right: "Expr"


@dataclass(eq=False)
class Call(Node):
    name: str  # internal function or builtin (safeAdd/safeSub/safeMul/transfer)
    args: list["Expr"]


Expr = Union[
    Literal, ArrayLit, Ident, Index, Member, MsgSender, MsgValue, ZeroAddress,
    Unary, Binary, Call,
]


# ── statements ───────────────────────────────────────────────────────────


@dataclass(eq=False)
class Block(Node):
    statements: list["Stmt"]


@dataclass(eq=False)
class If(Node):
    cond: Expr
    then: Block
    orelse: Optional[Union[Block, "If"]]


@dataclass(eq=False)
class For(Node):
    init: Optional[Union["LocalDecl", "Assign"]]
    cond: Optional[Expr]
    update: Optional["Assign"]
    body: Block


@dataclass(eq=False)
class While(Node):
    cond: Expr
    body: Block


@dataclass(eq=False)
class LocalDecl(Node):
    name: str
    type: Type
    init: Optional[Expr]


@dataclass(eq=False)
class Assign(Node):
    target: Expr  # Ident or Index chain
    op: str  # "=", "+=", "-=", "*=", "/=", "%="
    value: Expr


@dataclass(eq=False)
class ExprStmt(Node):
    expr: Expr


@dataclass(eq=False)
class Return(Node):
    values: list[Expr]


@dataclass(eq=False)
class Require(Node):
    cond: Expr
    message: Optional[str]


@dataclass(eq=False)
class Assert(Node):
    cond: Expr


@dataclass(eq=False)
class Revert(Node):
    message: Optional[str]


Stmt = Union[
    Block, If, For, While, LocalDecl, Assign, ExprStmt, Return, Require,
    Assert, Revert,
]


# ── declarations ─────────────────────────────────────────────────────────


@dataclass(eq=False)
class Param(Node):
    name: str
    type: Type


@dataclass(eq=False)
class StateVar(Node):
    name: str
    type: Type
    visibility: str  # "public" | "private" | "internal"
    init: Optional[Expr]


@dataclass(eq=False)
class FunctionDef(Node):
    name: str
    params: list[Param]
    returns: list[Type]
    visibility: str
    mutability: str  # "transaction" | "query"
    body: Block
    is_constructor: bool = False


@dataclass(eq=False)
class Contract(Node):
    name: str
    state_vars: list[StateVar]
    functions: list[FunctionDef]


# ── helpers ──────────────────────────────────────────────────────────────


def walk(node: Node) -> Iterator[Node]:
    """Preorder traversal; the visit order defines NodeId assignment."""
    yield node
    for c in node.children():
        yield from walk(c)


def renumber(root: Node) -> Node:
    """Assign dense preorder NodeIds (0..N-1). Returns the root for chaining."""
    for i, n in enumerate(walk(root)):
        n.node_id = i
    return root


def node_count(root: Node) -> int:
    return sum(1 for _ in walk(root))


def find_node(root: Node, node_id: int) -> Node:
    for n in walk(root):
        if n.node_id == node_id:
            return n
    raise KeyError(f"no node with id {node_id}")


def structure(node: Node) -> tuple:
    """Canonical structural form: nested tuples ignoring NodeId and SourcePos."""
    parts: list[object] = [type(node).__name__]
    for f in fields(node):  # type: ignore[arg-type]
        v = getattr(node, f.name)
        if isinstance(v, Node):
            parts.append(structure(v))
        elif isinstance(v, list):
            parts.append(tuple(structure(x) if isinstance(x, Node) else x for x in v))
        elif hasattr(v, "render") and not isinstance(v, (str, int, bool)):
            parts.append(v.render())
        else:
            parts.append(v)
    return tuple(parts)


def structurally_equal(a: Node, b: Node) -> bool:
    return structure(a) == structure(b)


def clone(node: Node) -> Node:
    """Deep copy preserving ids/positions; edits on the copy leave the input intact."""
    return copy.deepcopy(node)
