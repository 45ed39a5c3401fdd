"""Recursive-descent parser producing typed ASTs with preorder NodeIds.

The grammar is documented in docs/grammar.ebnf. ``parse`` only builds the
tree; name resolution and type checking live in ``typecheck``.
"""

from __future__ import annotations

from . import nodes as N
from . import types as T
from .errors import ParseError
from .lexer import Token, tokenize

_VISIBILITIES = ("public", "private", "internal")
_ASSIGN_OPS = ("=", "+=", "-=", "*=", "/=", "%=")
_CMP_OPS = ("==", "!=", "<", "<=", ">", ">=")


class _Parser:
    def __init__(self, tokens: list[Token], default_int_width: int):
        self.toks = tokens
        self.i = 0
        self.default_int_width = default_int_width

    # ── token plumbing ────────────────────────────────────────────────

    @property
    def cur(self) -> Token:
        return self.toks[self.i]

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.cur
        return t.kind == kind and (text is None or t.text == text)

    def at_sym(self, *texts: str) -> bool:
        return self.cur.kind == "sym" and self.cur.text in texts

    def advance(self) -> Token:
        t = self.cur
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, kind: str, text: str | None = None) -> Token:
        if not self.at(kind, text):
            want = text if text is not None else f"<{kind}>"
            raise ParseError(
                f"unexpected {self.cur.text!r}", self.cur.pos, expected=(want,)
            )
        return self.advance()

    def _node(self, node: N.Node, tok: Token) -> N.Node:
        node.pos = tok.pos
        return node

    # ── types ─────────────────────────────────────────────────────────

    def parse_type(self) -> T.Type:
        t = self.cur
        base: T.Type
        if t.kind == "keyword" and t.text == "bool":
            self.advance()
            base = T.BOOL
        elif t.kind == "keyword" and t.text == "address":
            self.advance()
            base = T.ADDRESS
        elif t.kind == "keyword" and t.text == "string":
            self.advance()
            base = T.STRING
        elif t.kind == "keyword" and t.text == "mapping":
            self.advance()
            self.expect("sym", "(")
            key = self.parse_type()
            self.expect("sym", "=>")
            value = self.parse_type()
            self.expect("sym", ")")
            base = T.MappingType(key, value)
        elif t.kind == "ident" and _int_type(t.text, self.default_int_width):
            self.advance()
            base = _int_type(t.text, self.default_int_width)  # type: ignore[assignment]
        else:
            raise ParseError(f"expected a type, found {t.text!r}", t.pos)
        while self.at_sym("["):
            self.advance()
            self.expect("sym", "]")
            base = T.ArrayType(base)
        return base

    def looks_like_type(self) -> bool:
        t = self.cur
        if t.kind == "keyword" and t.text in ("bool", "string", "mapping"):
            return True
        if t.kind == "keyword" and t.text == "address":
            # address(0) is an expression, `address x` / `address[]` a declaration
            return self.toks[self.i + 1].text != "("
        if t.kind == "ident" and _int_type(t.text, self.default_int_width):
            # a declaration is "type ident" or "type[] ident": peek ahead
            nxt = self.toks[self.i + 1]
            return nxt.kind == "ident" or (nxt.text == "[" and self.toks[self.i + 2].text == "]")
        return False

    # ── top level ─────────────────────────────────────────────────────

    def parse_contract(self) -> N.Contract:
        start = self.expect("keyword", "contract")
        name = self.expect("ident").text
        self.expect("sym", "{")
        state_vars: list[N.StateVar] = []
        functions: list[N.FunctionDef] = []
        while not self.at_sym("}"):
            if self.at("keyword", "function") or self.at("keyword", "constructor"):
                functions.append(self.parse_function())
            else:
                state_vars.append(self.parse_state_var())
        self.expect("sym", "}")
        self.expect("eof")
        node = N.Contract(name, state_vars, functions)
        return self._node(node, start)  # type: ignore[return-value]

    def parse_state_var(self) -> N.StateVar:
        start = self.cur
        ty = self.parse_type()
        visibility = "internal"
        if self.cur.kind == "keyword" and self.cur.text in _VISIBILITIES:
            visibility = self.advance().text
        name = self.expect("ident").text
        init = None
        if self.at_sym("="):
            self.advance()
            init = self.parse_expr()
        self.expect("sym", ";")
        return self._node(N.StateVar(name, ty, visibility, init), start)  # type: ignore[return-value]

    def parse_function(self) -> N.FunctionDef:
        start = self.cur
        if self.at("keyword", "constructor"):
            self.advance()
            params = self.parse_params()
            body = self.parse_block()
            fn = N.FunctionDef(
                "constructor", params, [], "public", "transaction", body,
                is_constructor=True,
            )
            return self._node(fn, start)  # type: ignore[return-value]
        self.expect("keyword", "function")
        name = self.expect("ident").text
        params = self.parse_params()
        if not (self.cur.kind == "keyword" and self.cur.text in _VISIBILITIES):
            raise ParseError(
                f"unexpected {self.cur.text!r}", self.cur.pos, expected=_VISIBILITIES
            )
        visibility = self.advance().text
        mutability = "transaction"
        if self.at("keyword", "query"):
            self.advance()
            mutability = "query"
        returns: list[T.Type] = []
        if self.at("keyword", "returns"):
            self.advance()
            self.expect("sym", "(")
            returns.append(self.parse_type())
            while self.at_sym(","):
                self.advance()
                returns.append(self.parse_type())
            self.expect("sym", ")")
        body = self.parse_block()
        fn = N.FunctionDef(name, params, returns, visibility, mutability, body)
        return self._node(fn, start)  # type: ignore[return-value]

    def parse_params(self) -> list[N.Param]:
        self.expect("sym", "(")
        params: list[N.Param] = []
        if not self.at_sym(")"):
            while True:
                start = self.cur
                ty = self.parse_type()
                pname = self.expect("ident").text
                params.append(self._node(N.Param(pname, ty), start))  # type: ignore[arg-type]
                if self.at_sym(","):
                    self.advance()
                    continue
                break
        self.expect("sym", ")")
        return params

    # ── statements ────────────────────────────────────────────────────

    def parse_block(self) -> N.Block:
        start = self.expect("sym", "{")
        stmts: list[N.Stmt] = []
        while not self.at_sym("}"):
            stmts.append(self.parse_stmt())
        self.expect("sym", "}")
        return self._node(N.Block(stmts), start)  # type: ignore[return-value]

    def parse_stmt(self) -> N.Stmt:
        t = self.cur
        if self.at_sym("{"):
            return self.parse_block()
        if t.kind == "keyword":
            if t.text == "if":
                return self.parse_if()
            if t.text == "for":
                return self.parse_for()
            if t.text == "while":
                self.advance()
                self.expect("sym", "(")
                cond = self.parse_expr()
                self.expect("sym", ")")
                body = self.parse_block()
                return self._node(N.While(cond, body), t)  # type: ignore[return-value]
            if t.text == "return":
                self.advance()
                values: list[N.Expr] = []
                if not self.at_sym(";"):
                    if self.at_sym("("):
                        # either a parenthesized expression or a value tuple;
                        # try tuple form first
                        save = self.i
                        self.advance()
                        first = self.parse_expr()
                        if self.at_sym(","):
                            values.append(first)
                            while self.at_sym(","):
                                self.advance()
                                values.append(self.parse_expr())
                            self.expect("sym", ")")
                        else:
                            self.i = save
                            values.append(self.parse_expr())
                    else:
                        values.append(self.parse_expr())
                self.expect("sym", ";")
                return self._node(N.Return(values), t)  # type: ignore[return-value]
            if t.text == "require":
                self.advance()
                self.expect("sym", "(")
                cond = self.parse_expr()
                message = None
                if self.at_sym(","):
                    self.advance()
                    message = self.expect("string").text
                self.expect("sym", ")")
                self.expect("sym", ";")
                return self._node(N.Require(cond, message), t)  # type: ignore[return-value]
            if t.text == "assert":
                self.advance()
                self.expect("sym", "(")
                cond = self.parse_expr()
                self.expect("sym", ")")
                self.expect("sym", ";")
                return self._node(N.Assert(cond), t)  # type: ignore[return-value]
            if t.text == "revert":
                self.advance()
                self.expect("sym", "(")
                message = None
                if self.at("string"):
                    message = self.advance().text
                self.expect("sym", ")")
                self.expect("sym", ";")
                return self._node(N.Revert(message), t)  # type: ignore[return-value]
        if self.looks_like_type():
            decl = self.parse_local_decl()
            self.expect("sym", ";")
            return decl
        stmt = self.parse_assign_or_expr()
        self.expect("sym", ";")
        return stmt

    def parse_local_decl(self) -> N.LocalDecl:
        start = self.cur
        ty = self.parse_type()
        name = self.expect("ident").text
        init = None
        if self.at_sym("="):
            self.advance()
            init = self.parse_expr()
        return self._node(N.LocalDecl(name, ty, init), start)  # type: ignore[return-value]

    def parse_assign_or_expr(self) -> N.Stmt:
        start = self.cur
        expr = self.parse_expr()
        if self.cur.kind == "sym" and self.cur.text in _ASSIGN_OPS:
            op = self.advance().text
            if not isinstance(expr, (N.Ident, N.Index)):
                raise ParseError("assignment target must be a variable or index", start.pos)
            value = self.parse_expr()
            return self._node(N.Assign(expr, op, value), start)  # type: ignore[return-value]
        return self._node(N.ExprStmt(expr), start)  # type: ignore[return-value]

    def parse_if(self) -> N.If:
        start = self.expect("keyword", "if")
        self.expect("sym", "(")
        cond = self.parse_expr()
        self.expect("sym", ")")
        then = self.parse_block()
        orelse = None
        if self.at("keyword", "else"):
            self.advance()
            if self.at("keyword", "if"):
                orelse = self.parse_if()
            else:
                orelse = self.parse_block()
        return self._node(N.If(cond, then, orelse), start)  # type: ignore[return-value]

    def parse_for(self) -> N.For:
        start = self.expect("keyword", "for")
        self.expect("sym", "(")
        init = None
        if not self.at_sym(";"):
            if self.looks_like_type():
                init = self.parse_local_decl()
            else:
                stmt = self.parse_assign_or_expr()
                if not isinstance(stmt, N.Assign):
                    raise ParseError("for-initializer must be a declaration or assignment", start.pos)
                init = stmt
        self.expect("sym", ";")
        cond = None
        if not self.at_sym(";"):
            cond = self.parse_expr()
        self.expect("sym", ";")
        update = None
        if not self.at_sym(")"):
            stmt = self.parse_assign_or_expr()
            if not isinstance(stmt, N.Assign):
                raise ParseError("for-update must be an assignment", start.pos)
            update = stmt
        self.expect("sym", ")")
        body = self.parse_block()
        return self._node(N.For(init, cond, update, body), start)  # type: ignore[return-value]

    # ── expressions (precedence climbing) ─────────────────────────────

    def parse_expr(self) -> N.Expr:
        return self.parse_or()

    def parse_or(self) -> N.Expr:
        left = self.parse_and()
        while self.at_sym("||"):
            t = self.advance()
            right = self.parse_and()
            left = self._node(N.Binary("||", left, right), t)  # type: ignore[assignment]
        return left

    def parse_and(self) -> N.Expr:
        left = self.parse_cmp()
        while self.at_sym("&&"):
            t = self.advance()
            right = self.parse_cmp()
            left = self._node(N.Binary("&&", left, right), t)  # type: ignore[assignment]
        return left

    def parse_cmp(self) -> N.Expr:
        left = self.parse_add()
        if self.cur.kind == "sym" and self.cur.text in _CMP_OPS:
            t = self.advance()
            right = self.parse_add()
            left = self._node(N.Binary(t.text, left, right), t)  # type: ignore[assignment]
        return left

    def parse_add(self) -> N.Expr:
        left = self.parse_mul()
        while self.at_sym("+", "-"):
            t = self.advance()
            right = self.parse_mul()
            left = self._node(N.Binary(t.text, left, right), t)  # type: ignore[assignment]
        return left

    def parse_mul(self) -> N.Expr:
        left = self.parse_unary()
        while self.at_sym("*", "/", "%"):
            t = self.advance()
            right = self.parse_unary()
            left = self._node(N.Binary(t.text, left, right), t)  # type: ignore[assignment]
        return left

    def parse_unary(self) -> N.Expr:
        if self.at_sym("!", "-"):
            t = self.advance()
            operand = self.parse_unary()
            return self._node(N.Unary(t.text, operand), t)  # type: ignore[return-value]
        return self.parse_postfix()

    def parse_postfix(self) -> N.Expr:
        expr = self.parse_primary()
        while True:
            if self.at_sym("["):
                t = self.advance()
                index = self.parse_expr()
                self.expect("sym", "]")
                expr = self._node(N.Index(expr, index), t)  # type: ignore[assignment]
            elif self.at_sym("."):
                t = self.advance()
                name = self.expect("ident").text
                if name != "length":
                    raise ParseError(f"unknown member {name!r}", t.pos)
                expr = self._node(N.Member(expr, name), t)  # type: ignore[assignment]
            else:
                return expr

    def parse_primary(self) -> N.Expr:
        t = self.cur
        if t.kind == "int":
            self.advance()
            return self._node(N.Literal("int", t.value), t)  # type: ignore[return-value]
        if t.kind == "string":
            self.advance()
            return self._node(N.Literal("string", t.value), t)  # type: ignore[return-value]
        if t.kind == "keyword" and t.text in ("true", "false"):
            self.advance()
            return self._node(N.Literal("bool", t.text == "true"), t)  # type: ignore[return-value]
        if t.kind == "keyword" and t.text == "msg":
            self.advance()
            self.expect("sym", ".")
            name = self.expect("ident").text
            if name == "sender":
                return self._node(N.MsgSender(), t)  # type: ignore[return-value]
            if name == "value":
                return self._node(N.MsgValue(), t)  # type: ignore[return-value]
            raise ParseError(f"unknown msg member {name!r}", t.pos)
        if t.kind == "keyword" and t.text == "address":
            self.advance()
            self.expect("sym", "(")
            zero = self.expect("int")
            if zero.value != 0:
                raise ParseError("only address(0) is supported", zero.pos)
            self.expect("sym", ")")
            return self._node(N.ZeroAddress(), t)  # type: ignore[return-value]
        if t.kind == "sym" and t.text == "[":
            self.advance()
            elements: list[N.Expr] = []
            if not self.at_sym("]"):
                elements.append(self.parse_expr())
                while self.at_sym(","):
                    self.advance()
                    elements.append(self.parse_expr())
            self.expect("sym", "]")
            return self._node(N.ArrayLit(elements), t)  # type: ignore[return-value]
        if t.kind == "sym" and t.text == "(":
            self.advance()
            expr = self.parse_expr()
            self.expect("sym", ")")
            return expr
        if t.kind == "ident":
            self.advance()
            if self.at_sym("("):
                self.advance()
                args: list[N.Expr] = []
                if not self.at_sym(")"):
                    args.append(self.parse_expr())
                    while self.at_sym(","):
                        self.advance()
                        args.append(self.parse_expr())
                self.expect("sym", ")")
                return self._node(N.Call(t.text, args), t)  # type: ignore[return-value]
            return self._node(N.Ident(t.text), t)  # type: ignore[return-value]
        raise ParseError(
            f"unexpected {t.text!r}", t.pos,
            expected=("expression",),
        )


def _int_type(word: str, default_width: int) -> T.IntType | None:
    if word == "int":
        return T.IntType(default_width, signed=True)
    if word == "uint":
        return T.IntType(default_width, signed=False)
    for prefix, signed in (("uint", False), ("int", True)):
        if word.startswith(prefix) and word[len(prefix):].isdigit():
            width = int(word[len(prefix):])
            if width in T.INT_WIDTHS:
                return T.IntType(width, signed)
    return None


def parse(source: str, default_int_width: int = 64) -> N.Contract:
    """Parse a contract; NodeIds are assigned in preorder before returning."""
    toks = tokenize(source)
    contract = _Parser(toks, default_int_width).parse_contract()
    N.renumber(contract)
    return contract
