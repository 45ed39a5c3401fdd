"""Name resolution and type checking.

``check`` validates a parsed contract and returns a ``CheckedContract``
carrying per-node type and binding annotations, which the VM, the fault
catalog and the workload generators all consume.

Rules beyond the obvious:
  - mappings exist only as state-variable types (nested mapping values allowed);
  - integer literals adopt the type demanded by context and must fit its range;
  - query functions must not assign state, move native funds, read msg.value,
    or call transaction functions;
  - recursion (direct or mutual) is rejected so execution stack depth stays
    bounded by the contract text;
  - bare expression statements must be calls.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import nodes as N
from . import types as T
from .errors import TypeCheckError

BUILTIN_FNS = ("safeAdd", "safeSub", "safeMul", "transfer")
SAFE_MATH_FNS = ("safeAdd", "safeSub", "safeMul")


@dataclass
class CheckedContract:
    """A contract together with the checker's annotations."""

    contract: N.Contract
    expr_types: dict[int, T.Type] = field(default_factory=dict)
    bindings: dict[int, tuple[str, str]] = field(default_factory=dict)
    fn_of: dict[int, str] = field(default_factory=dict)
    functions: dict[str, N.FunctionDef] = field(default_factory=dict)
    state_vars: dict[str, N.StateVar] = field(default_factory=dict)

    def type_of(self, node: N.Node) -> T.Type:
        return self.expr_types[node.node_id]

    def enclosing_fn(self, node: N.Node) -> N.FunctionDef | None:
        name = self.fn_of.get(node.node_id)
        return self.functions.get(name) if name is not None else None

    def references_sender(self, expr: N.Node) -> bool:
        return any(isinstance(n, N.MsgSender) for n in N.walk(expr))

    def references_param(self, expr: N.Node) -> bool:
        for n in N.walk(expr):
            if isinstance(n, N.Ident) and self.bindings.get(n.node_id, ("", ""))[0] == "param":
                return True
        return False

    @property
    def constructor(self) -> N.FunctionDef | None:
        for fn in self.contract.functions:
            if fn.is_constructor:
                return fn
        return None

    def public_functions(self) -> list[N.FunctionDef]:
        return [
            fn for fn in self.contract.functions
            if fn.visibility == "public" and not fn.is_constructor
        ]


class _Checker:
    def __init__(self, contract: N.Contract, default_int_width: int):
        self.c = contract
        self.width = default_int_width
        self.out = CheckedContract(contract)
        self.scopes: list[dict[str, tuple[str, T.Type]]] = []
        self.fn: N.FunctionDef | None = None

    def fail(self, msg: str, node: N.Node) -> TypeCheckError:
        return TypeCheckError(msg, node.pos)

    # ── environment ───────────────────────────────────────────────────

    def lookup(self, name: str) -> tuple[str, T.Type] | None:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        sv = self.out.state_vars.get(name)
        if sv is not None:
            return ("state", sv.type)
        return None

    def declare(self, name: str, kind: str, ty: T.Type, node: N.Node) -> None:
        if name in SAFE_MATH_FNS or name in self.out.functions:
            raise self.fail(f"{name!r} collides with a function name", node)
        if self.lookup(name) is not None:
            raise self.fail(f"{name!r} is already declared", node)
        self.scopes[-1][name] = (kind, ty)

    # ── entry point ───────────────────────────────────────────────────

    def run(self) -> CheckedContract:
        seen_ctor = False
        for sv in self.c.state_vars:
            if sv.name in self.out.state_vars:
                raise self.fail(f"duplicate state variable {sv.name!r}", sv)
            self.out.state_vars[sv.name] = sv
        for fn in self.c.functions:
            if fn.is_constructor:
                if seen_ctor:
                    raise self.fail("more than one constructor", fn)
                seen_ctor = True
                continue
            # a contract may define its own `transfer` (shadowing the native
            # builtin), but the safe-arithmetic names stay reserved
            if fn.name in SAFE_MATH_FNS:
                raise self.fail(f"{fn.name!r} shadows a builtin", fn)
            if fn.name in self.out.functions or fn.name in self.out.state_vars:
                raise self.fail(f"duplicate declaration {fn.name!r}", fn)
            self.out.functions[fn.name] = fn
        for sv in self.c.state_vars:
            self.check_state_var(sv)
        for fn in self.c.functions:
            self.check_function(fn)
        self.check_no_recursion()
        return self.out

    def check_state_var(self, sv: N.StateVar) -> None:
        if isinstance(sv.type, T.ArrayType) and T.contains_mapping(sv.type):
            raise self.fail("mapping not allowed inside an array", sv)
        if sv.init is not None:
            if isinstance(sv.type, T.MappingType):
                raise self.fail("mappings cannot be initialized", sv)
            if not _is_constant(sv.init):
                raise self.fail("state initializer must be a constant", sv)
            self.scopes.append({})
            self.fn = None
            got = self.check_expr(sv.init, sv.type)
            self.scopes.pop()
            if got != sv.type:
                raise self.fail(
                    f"initializer of {sv.name!r} has type {got.render()}, "
                    f"expected {sv.type.render()}", sv)

    def check_function(self, fn: N.FunctionDef) -> None:
        self.fn = fn
        self.scopes = [{}]
        for p in fn.params:
            if T.contains_mapping(p.type):
                raise self.fail("mapping not allowed as a parameter", p)
            self.declare(p.name, "param", p.type, p)
        for rt in fn.returns:
            if T.contains_mapping(rt):
                raise self.fail("mapping not allowed as a return type", fn)
        if fn.is_constructor and fn.returns:
            raise self.fail("constructor cannot return values", fn)
        self._mark_fn(fn)
        self.check_block(fn.body, new_scope=False)
        self.scopes = []
        self.fn = None

    def _mark_fn(self, fn: N.FunctionDef) -> None:
        for n in N.walk(fn):
            self.out.fn_of[n.node_id] = fn.name

    # ── statements ────────────────────────────────────────────────────

    def check_block(self, block: N.Block, new_scope: bool = True) -> None:
        if new_scope:
            self.scopes.append({})
        for s in block.statements:
            self.check_stmt(s)
        if new_scope:
            self.scopes.pop()

    def check_stmt(self, s: N.Stmt) -> None:
        fn = self.fn
        assert fn is not None
        if isinstance(s, N.Block):
            self.check_block(s)
        elif isinstance(s, N.If):
            self.expect_bool(s.cond)
            self.check_block(s.then)
            if isinstance(s.orelse, N.Block):
                self.check_block(s.orelse)
            elif isinstance(s.orelse, N.If):
                self.check_stmt(s.orelse)
        elif isinstance(s, N.While):
            self.expect_bool(s.cond)
            self.check_block(s.body)
        elif isinstance(s, N.For):
            self.scopes.append({})
            if s.init is not None:
                self.check_stmt(s.init)
            if s.cond is not None:
                self.expect_bool(s.cond)
            if s.update is not None:
                self.check_stmt(s.update)
            self.check_block(s.body, new_scope=False)
            self.scopes.pop()
        elif isinstance(s, N.LocalDecl):
            if T.contains_mapping(s.type) or isinstance(s.type, T.MappingType):
                raise self.fail("mapping not allowed as a local variable", s)
            if s.init is not None:
                got = self.check_expr(s.init, s.type)
                if got != s.type:
                    raise self.fail(
                        f"initializer has type {got.render()}, expected {s.type.render()}", s)
            self.declare(s.name, "local", s.type, s)
        elif isinstance(s, N.Assign):
            target_t = self.check_lvalue(s.target)
            if s.op != "=" and not isinstance(target_t, T.IntType):
                raise self.fail(f"operator {s.op} needs an integer target", s)
            got = self.check_expr(s.value, target_t)
            if got != target_t:
                raise self.fail(
                    f"cannot assign {got.render()} to {target_t.render()}", s)
        elif isinstance(s, N.ExprStmt):
            if not isinstance(s.expr, N.Call):
                raise self.fail("expression statement must be a call", s)
            self.check_call(s.expr, None, statement=True)
        elif isinstance(s, N.Return):
            if len(s.values) != len(fn.returns):
                raise self.fail(
                    f"return arity {len(s.values)} does not match "
                    f"declared {len(fn.returns)}", s)
            for v, rt in zip(s.values, fn.returns):
                got = self.check_expr(v, rt)
                if got != rt:
                    raise self.fail(
                        f"return value has type {got.render()}, expected {rt.render()}", s)
        elif isinstance(s, N.Require):
            self.expect_bool(s.cond)
        elif isinstance(s, N.Assert):
            self.expect_bool(s.cond)
        elif isinstance(s, N.Revert):
            pass
        else:  # pragma: no cover
            raise self.fail(f"unknown statement {type(s).__name__}", s)

    def check_lvalue(self, e: N.Expr) -> T.Type:
        if isinstance(e, N.Ident):
            hit = self.lookup(e.name)
            if hit is None:
                raise self.fail(f"unknown variable {e.name!r}", e)
            kind, ty = hit
            if isinstance(ty, T.MappingType):
                raise self.fail("whole mappings cannot be assigned", e)
            if kind == "state":
                self._forbid_in_query("state assignment", e)
            self.out.bindings[e.node_id] = (kind, e.name)
            self.out.expr_types[e.node_id] = ty
            return ty
        if isinstance(e, N.Index):
            base_t = self._lvalue_base(e.base)
            idx_expected: T.Type | None
            if isinstance(base_t, T.MappingType):
                idx_expected = base_t.key
                result = base_t.value
            elif isinstance(base_t, T.ArrayType):
                idx_expected = None
                result = base_t.elem
            else:
                raise self.fail("only arrays and mappings can be indexed", e)
            got = self.check_expr(e.index, idx_expected)
            if isinstance(base_t, T.MappingType):
                if got != base_t.key:
                    raise self.fail(
                        f"mapping key has type {got.render()}, "
                        f"expected {base_t.key.render()}", e)
            elif not (isinstance(got, T.IntType) and not got.signed):
                raise self.fail("array index must be unsigned", e)
            if isinstance(result, T.MappingType):
                raise self.fail("nested mapping requires another index", e)
            self.out.expr_types[e.node_id] = result
            return result
        raise self.fail("assignment target must be a variable or index", e)

    def _lvalue_base(self, e: N.Expr) -> T.Type:
        """Type of an index base inside an lvalue; tracks query purity for state."""
        if isinstance(e, N.Ident):
            hit = self.lookup(e.name)
            if hit is None:
                raise self.fail(f"unknown variable {e.name!r}", e)
            kind, ty = hit
            if kind == "state":
                self._forbid_in_query("state assignment", e)
            self.out.bindings[e.node_id] = (kind, e.name)
            self.out.expr_types[e.node_id] = ty
            return ty
        if isinstance(e, N.Index):
            base_t = self._lvalue_base(e.base)
            if isinstance(base_t, T.MappingType):
                got = self.check_expr(e.index, base_t.key)
                if got != base_t.key:
                    raise self.fail("mapping key type mismatch", e)
                result = base_t.value
            elif isinstance(base_t, T.ArrayType):
                got = self.check_expr(e.index, None)
                if not (isinstance(got, T.IntType) and not got.signed):
                    raise self.fail("array index must be unsigned", e)
                result = base_t.elem
            else:
                raise self.fail("only arrays and mappings can be indexed", e)
            self.out.expr_types[e.node_id] = result
            return result
        raise self.fail("bad assignment target", e)

    def _forbid_in_query(self, what: str, node: N.Node) -> None:
        if self.fn is not None and self.fn.mutability == "query":
            raise self.fail(f"{what} not allowed in a query function", node)

    # ── expressions ───────────────────────────────────────────────────

    def expect_bool(self, e: N.Expr) -> None:
        got = self.check_expr(e, T.BOOL)
        if got != T.BOOL:
            raise self.fail(f"condition has type {got.render()}, expected bool", e)

    def check_expr(self, e: N.Expr, expected: T.Type | None) -> T.Type:
        ty = self._infer(e, expected)
        self.out.expr_types[e.node_id] = ty
        return ty

    def _infer(self, e: N.Expr, expected: T.Type | None) -> T.Type:
        if isinstance(e, N.Literal):
            if e.kind == "bool":
                return T.BOOL
            if e.kind == "string":
                return T.STRING
            value = int(e.value)  # type: ignore[arg-type]
            if isinstance(expected, T.IntType):
                if not expected.contains(value):
                    raise self.fail(
                        f"literal {value} out of range for {expected.render()}", e)
                return expected
            ty = T.uint(self.width)
            if not ty.contains(value):
                raise self.fail(f"literal {value} out of range for {ty.render()}", e)
            return ty
        if isinstance(e, N.ArrayLit):
            elem_expected = expected.elem if isinstance(expected, T.ArrayType) else None
            if not e.elements:
                if elem_expected is None:
                    raise self.fail("cannot infer the type of an empty array literal", e)
                return expected  # type: ignore[return-value]
            first = self.check_expr(e.elements[0], elem_expected)
            for x in e.elements[1:]:
                got = self.check_expr(x, first)
                if got != first:
                    raise self.fail("array literal elements must share one type", e)
            return T.ArrayType(first)
        if isinstance(e, N.Ident):
            hit = self.lookup(e.name)
            if hit is None:
                raise self.fail(f"unknown identifier {e.name!r}", e)
            kind, ty = hit
            self.out.bindings[e.node_id] = (kind, e.name)
            return ty
        if isinstance(e, N.MsgSender):
            return T.ADDRESS
        if isinstance(e, N.MsgValue):
            self._forbid_in_query("msg.value", e)
            return T.uint(self.width)
        if isinstance(e, N.ZeroAddress):
            return T.ADDRESS
        if isinstance(e, N.Index):
            base_t = self.check_expr(e.base, None)
            if isinstance(base_t, T.MappingType):
                got = self.check_expr(e.index, base_t.key)
                if got != base_t.key:
                    raise self.fail(
                        f"mapping key has type {got.render()}, "
                        f"expected {base_t.key.render()}", e)
                if isinstance(base_t.value, T.MappingType):
                    return base_t.value  # consumed by an enclosing Index
                return base_t.value
            if isinstance(base_t, T.ArrayType):
                got = self.check_expr(e.index, None)
                if not (isinstance(got, T.IntType) and not got.signed):
                    raise self.fail("array index must be unsigned", e)
                return base_t.elem
            raise self.fail("only arrays and mappings can be indexed", e)
        if isinstance(e, N.Member):
            base_t = self.check_expr(e.base, None)
            if e.name == "length" and isinstance(base_t, (T.ArrayType, T.StringType)):
                return T.uint(self.width)
            raise self.fail(f"no member {e.name!r} on {base_t.render()}", e)
        if isinstance(e, N.Unary):
            if e.op == "!":
                self.expect_bool(e.operand)
                return T.BOOL
            if isinstance(e.operand, N.Literal) and e.operand.kind == "int" \
                    and isinstance(expected, T.IntType) and expected.signed:
                # negative literal: the negated value must fit, not the raw one
                v = -int(e.operand.value)  # type: ignore[arg-type]
                if not expected.contains(v):
                    raise self.fail(
                        f"literal {v} out of range for {expected.render()}", e)
                self.out.expr_types[e.operand.node_id] = expected
                return expected
            got = self.check_expr(e.operand, expected if isinstance(expected, T.IntType) else None)
            if not isinstance(got, T.IntType) or not got.signed:
                raise self.fail("unary minus needs a signed integer", e)
            return got
        if isinstance(e, N.Binary):
            return self._infer_binary(e, expected)
        if isinstance(e, N.Call):
            ty = self.check_call(e, expected, statement=False)
            if ty is None:
                raise self.fail(f"call to {e.name!r} produces no value", e)
            return ty
        raise self.fail(f"unknown expression {type(e).__name__}", e)

    def _numeric_pair(self, e: N.Binary, expected: T.Type | None) -> T.IntType:
        exp = expected if isinstance(expected, T.IntType) else None
        if exp is not None:
            lt = self.check_expr(e.left, exp)
            rt = self.check_expr(e.right, exp)
        else:
            if isinstance(e.left, N.Literal) and e.left.kind == "int" \
                    and not (isinstance(e.right, N.Literal) and e.right.kind == "int"):
                rt = self.check_expr(e.right, None)
                lt = self.check_expr(e.left, rt if isinstance(rt, T.IntType) else None)
            else:
                lt = self.check_expr(e.left, None)
                rt = self.check_expr(e.right, lt if isinstance(lt, T.IntType) else None)
        if not isinstance(lt, T.IntType) or lt != rt:
            raise self.fail(
                f"operator {e.op} needs matching integer operands "
                f"({_rn(lt)} vs {_rn(rt)})", e)
        return lt

    def _infer_binary(self, e: N.Binary, expected: T.Type | None) -> T.Type:
        op = e.op
        if op in ("&&", "||"):
            self.expect_bool(e.left)
            self.expect_bool(e.right)
            return T.BOOL
        if op in ("+", "-", "*", "/", "%"):
            return self._numeric_pair(e, expected)
        if op in ("<", "<=", ">", ">="):
            self._numeric_pair(e, None)
            return T.BOOL
        if op in ("==", "!="):
            lt = self.check_expr(e.left, None)
            if isinstance(lt, T.IntType) or not isinstance(
                    lt, (T.BoolType, T.AddressType, T.StringType)):
                lt = self._numeric_pair(e, None)
            else:
                rt = self.check_expr(e.right, None)
                if rt != lt:
                    raise self.fail(
                        f"cannot compare {lt.render()} with {rt.render()}", e)
            return T.BOOL
        raise self.fail(f"unknown operator {op!r}", e)

    def check_call(self, e: N.Call, expected: T.Type | None, statement: bool) -> T.Type | None:
        fn = self.fn
        assert fn is not None
        if e.name in SAFE_MATH_FNS:
            if len(e.args) != 2:
                raise self.fail(f"{e.name} takes two arguments", e)
            exp = expected if isinstance(expected, T.IntType) else None
            if exp is not None:
                lt = self.check_expr(e.args[0], exp)
                rt = self.check_expr(e.args[1], exp)
            else:
                lt = self.check_expr(e.args[0], None)
                rt = self.check_expr(e.args[1], lt if isinstance(lt, T.IntType) else None)
            if not isinstance(lt, T.IntType) or lt != rt:
                raise self.fail(f"{e.name} needs matching integer operands", e)
            return lt
        if e.name == "transfer" and "transfer" not in self.out.functions:
            self._forbid_in_query("transfer", e)
            if len(e.args) != 2:
                raise self.fail("transfer takes (address, amount)", e)
            to_t = self.check_expr(e.args[0], T.ADDRESS)
            amt_t = self.check_expr(e.args[1], None)
            if to_t != T.ADDRESS:
                raise self.fail("transfer target must be an address", e)
            if not (isinstance(amt_t, T.IntType) and not amt_t.signed):
                raise self.fail("transfer amount must be unsigned", e)
            if not statement:
                raise self.fail("transfer produces no value", e)
            return None
        target = self.out.functions.get(e.name)
        if target is None:
            raise self.fail(f"unknown function {e.name!r}", e)
        if fn.mutability == "query" and target.mutability != "query":
            raise self.fail("query functions may only call query functions", e)
        if len(e.args) != len(target.params):
            raise self.fail(
                f"{e.name} takes {len(target.params)} arguments, got {len(e.args)}", e)
        for a, p in zip(e.args, target.params):
            got = self.check_expr(a, p.type)
            if got != p.type:
                raise self.fail(
                    f"argument {p.name!r} has type {got.render()}, "
                    f"expected {p.type.render()}", e)
        if statement:
            return target.returns[0] if len(target.returns) == 1 else None
        if len(target.returns) != 1:
            raise self.fail(
                f"{e.name} must return exactly one value to be used in an expression", e)
        return target.returns[0]

    # ── recursion ─────────────────────────────────────────────────────

    def check_no_recursion(self) -> None:
        edges: dict[str, set[str]] = {}
        for fn in self.c.functions:
            name = "constructor" if fn.is_constructor else fn.name
            edges[name] = {
                n.name for n in N.walk(fn)
                if isinstance(n, N.Call) and n.name in self.out.functions
            }
        state: dict[str, int] = {}

        def visit(name: str) -> None:
            state[name] = 1
            for callee in sorted(edges.get(name, ())):
                if state.get(callee) == 1:
                    raise TypeCheckError(f"recursive call involving {callee!r}")
                if state.get(callee, 0) == 0:
                    visit(callee)
            state[name] = 2

        for name in edges:
            if state.get(name, 0) == 0:
                visit(name)


def _is_constant(e: N.Expr) -> bool:
    if isinstance(e, N.Literal):
        return True
    if isinstance(e, N.ZeroAddress):
        return True
    if isinstance(e, N.Unary) and e.op == "-":
        return isinstance(e.operand, N.Literal) and e.operand.kind == "int"
    if isinstance(e, N.ArrayLit):
        return all(_is_constant(x) for x in e.elements)
    return False


def _rn(t: T.Type | None) -> str:
    return t.render() if t is not None else "?"


def check(contract: N.Contract, default_int_width: int = 64) -> CheckedContract:
    return _Checker(contract, default_int_width).run()
