"""Deterministic source printer.

``print_contract`` emits canonical formatting (4-space indent, one statement
per line, braces on the statement line). Reparsing the output yields an AST
structurally equal to the input.
"""

from __future__ import annotations

from . import nodes as N

_PREC = {
    "||": 1, "&&": 2,
    "==": 3, "!=": 3, "<": 3, "<=": 3, ">": 3, ">=": 3,
    "+": 4, "-": 4,
    "*": 5, "/": 5, "%": 5,
}
_UNARY_PREC = 6
_POSTFIX_PREC = 7


def _escape(s: str) -> str:
    out = []
    for ch in s:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        else:
            out.append(ch)
    return "".join(out)


def print_expr(e: N.Expr, parent_prec: int = 0) -> str:
    if isinstance(e, N.Literal):
        if e.kind == "int":
            text = str(e.value)
        elif e.kind == "bool":
            text = "true" if e.value else "false"
        else:
            text = f'"{_escape(e.value)}"'  # type: ignore[arg-type]
        return text
    if isinstance(e, N.ArrayLit):
        return "[" + ", ".join(print_expr(x) for x in e.elements) + "]"
    if isinstance(e, N.Ident):
        return e.name
    if isinstance(e, N.MsgSender):
        return "msg.sender"
    if isinstance(e, N.MsgValue):
        return "msg.value"
    if isinstance(e, N.ZeroAddress):
        return "address(0)"
    if isinstance(e, N.Index):
        return f"{print_expr(e.base, _POSTFIX_PREC)}[{print_expr(e.index)}]"
    if isinstance(e, N.Member):
        return f"{print_expr(e.base, _POSTFIX_PREC)}.{e.name}"
    if isinstance(e, N.Call):
        return f"{e.name}(" + ", ".join(print_expr(a) for a in e.args) + ")"
    if isinstance(e, N.Unary):
        text = e.op + print_expr(e.operand, _UNARY_PREC)
        return f"({text})" if parent_prec > _UNARY_PREC else text
    if isinstance(e, N.Binary):
        prec = _PREC[e.op]
        # comparisons do not chain, so a comparison child always needs parens
        left = print_expr(e.left, prec + 1 if prec == 3 else prec)
        # binary operators associate left; right child needs one level more
        right = print_expr(e.right, prec + 1)
        text = f"{left} {e.op} {right}"
        return f"({text})" if parent_prec > prec else text
    raise TypeError(f"unprintable expression {type(e).__name__}")


def _print_simple_stmt(s: N.Stmt) -> str:
    """Statement text without trailing semicolon (used in for-headers too)."""
    if isinstance(s, N.LocalDecl):
        text = f"{s.type.render()} {s.name}"
        if s.init is not None:
            text += f" = {print_expr(s.init)}"
        return text
    if isinstance(s, N.Assign):
        return f"{print_expr(s.target)} {s.op} {print_expr(s.value)}"
    if isinstance(s, N.ExprStmt):
        return print_expr(s.expr)
    if isinstance(s, N.Return):
        if not s.values:
            return "return"
        if len(s.values) == 1:
            return f"return {print_expr(s.values[0])}"
        return "return (" + ", ".join(print_expr(v) for v in s.values) + ")"
    if isinstance(s, N.Require):
        if s.message is not None:
            return f'require({print_expr(s.cond)}, "{_escape(s.message)}")'
        return f"require({print_expr(s.cond)})"
    if isinstance(s, N.Assert):
        return f"assert({print_expr(s.cond)})"
    if isinstance(s, N.Revert):
        if s.message is not None:
            return f'revert("{_escape(s.message)}")'
        return "revert()"
    raise TypeError(f"not a simple statement: {type(s).__name__}")


def _print_stmt(s: N.Stmt, indent: int, out: list[str]) -> None:
    pad = "    " * indent
    if isinstance(s, N.Block):
        out.append(pad + "{")
        for inner in s.statements:
            _print_stmt(inner, indent + 1, out)
        out.append(pad + "}")
        return
    if isinstance(s, N.If):
        _print_if(s, indent, out, pad + "if ")
        return
    if isinstance(s, N.While):
        out.append(f"{pad}while ({print_expr(s.cond)}) {{")
        for inner in s.body.statements:
            _print_stmt(inner, indent + 1, out)
        out.append(pad + "}")
        return
    if isinstance(s, N.For):
        init = _print_simple_stmt(s.init) if s.init is not None else ""
        cond = print_expr(s.cond) if s.cond is not None else ""
        update = _print_simple_stmt(s.update) if s.update is not None else ""
        out.append(f"{pad}for ({init}; {cond}; {update}) {{")
        for inner in s.body.statements:
            _print_stmt(inner, indent + 1, out)
        out.append(pad + "}")
        return
    out.append(pad + _print_simple_stmt(s) + ";")


def _print_if(s: N.If, indent: int, out: list[str], head: str) -> None:
    pad = "    " * indent
    out.append(f"{head}({print_expr(s.cond)}) {{")
    for inner in s.then.statements:
        _print_stmt(inner, indent + 1, out)
    if s.orelse is None:
        out.append(pad + "}")
    elif isinstance(s.orelse, N.If):
        _print_if(s.orelse, indent, out, pad + "} else if ")
    else:
        out.append(pad + "} else {")
        for inner in s.orelse.statements:
            _print_stmt(inner, indent + 1, out)
        out.append(pad + "}")


def print_contract(contract: N.Contract) -> str:
    out: list[str] = [f"contract {contract.name} {{"]
    for sv in contract.state_vars:
        line = f"    {sv.type.render()}"
        if sv.visibility != "internal":
            line += f" {sv.visibility}"
        line += f" {sv.name}"
        if sv.init is not None:
            line += f" = {print_expr(sv.init)}"
        out.append(line + ";")
    for fn in contract.functions:
        out.append("")
        params = ", ".join(f"{p.type.render()} {p.name}" for p in fn.params)
        if fn.is_constructor:
            head = f"    constructor({params}) {{"
        else:
            head = f"    function {fn.name}({params}) {fn.visibility}"
            if fn.mutability == "query":
                head += " query"
            if fn.returns:
                head += " returns (" + ", ".join(t.render() for t in fn.returns) + ")"
            head += " {"
        out.append(head)
        for stmt in fn.body.statements:
            _print_stmt(stmt, 2, out)
        out.append("    }")
    out.append("}")
    return "\n".join(out) + "\n"
