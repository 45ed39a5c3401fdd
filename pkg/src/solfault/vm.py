"""Deterministic ledger virtual machine.

Executes one transaction at a time against a versioned key-value ledger.
Every AST node evaluation costs one step, storage reads/writes cost ten;
exhausting the step budget aborts the call and reverts its effects, as does
any require/assert/revert or builtin platform check. Native currency
balances live in the same versioned store under the ``__native__``
namespace, so transfers show up in read/write sets like any other state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .lang import nodes as N
from .lang import types as T
from .lang.typecheck import SAFE_MATH_FNS, CheckedContract
from .lang.values import (
    ZERO_ADDRESS, Value, addrval, render_value, value_from_json,
    value_to_json, zero_value,
)

STORAGE_COST = 10

ABORT_KINDS = (
    "aborted_require", "aborted_assert", "aborted_revert", "aborted_builtin",
    "aborted_gas", "aborted_timeout",
)
BUILTIN_REASONS = (
    "index-out-of-bounds", "division-by-zero", "insufficient-balance",
    "checked-overflow",
)


@dataclass(frozen=True)
class VmConfig:
    """Execution budgets and arithmetic knobs.

    ``step_budget`` None disables the gas check, leaving the (larger)
    ``timeout_budget`` as the only runaway-execution stop; that mode models
    the platform-timeout campaign.
    """

    step_budget: int | None = 100_000
    timeout_budget: int = 1_000_000
    default_int_width: int = 64
    checked_arithmetic: bool = True

    def __post_init__(self) -> None:
        if self.step_budget is not None and self.step_budget <= 0:
            raise ValueError("step budget must be positive")
        if self.timeout_budget <= 0:
            raise ValueError("timeout budget must be positive")

    def to_json(self) -> dict:
        return {
            "step_budget": self.step_budget,
            "timeout_budget": self.timeout_budget,
            "default_int_width": self.default_int_width,
            "checked_arithmetic": self.checked_arithmetic,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "VmConfig":
        return cls(**{k: obj[k] for k in obj})


@dataclass(frozen=True)
class TxStatus:
    kind: str  # "committed" or one of ABORT_KINDS
    message: str | None = None
    reason: str | None = None  # builtin abort kind

    @property
    def committed(self) -> bool:
        return self.kind == "committed"

    @property
    def gas_or_timeout(self) -> bool:
        return self.kind in ("aborted_gas", "aborted_timeout")

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.message is not None:
            out["message"] = self.message
        if self.reason is not None:
            out["reason"] = self.reason
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "TxStatus":
        return cls(obj["kind"], obj.get("message"), obj.get("reason"))


COMMITTED = TxStatus("committed")


@dataclass(frozen=True)
class TxCall:
    caller: str
    function: str
    args: tuple[Value, ...] = ()
    value: int = 0
    note: str = ""

    def to_json(self) -> dict:
        return {
            "caller": self.caller,
            "function": self.function,
            "args": [value_to_json(a) for a in self.args],
            "value": self.value,
        }


@dataclass(frozen=True)
class TxRecord:
    call: TxCall
    status: TxStatus
    returns: tuple[Value, ...]
    reads: tuple[tuple[str, int], ...]  # (key, pre-tx version), sorted by key
    writes: tuple[tuple[str, Value], ...]  # (key, new value), sorted by key
    steps: int

    def to_json(self) -> dict:
        return {
            "call": self.call.to_json(),
            "status": self.status.to_json(),
            "returns": [value_to_json(v) for v in self.returns],
            "reads": [[k, ver] for k, ver in self.reads],
            "writes": [[k, value_to_json(v)] for k, v in self.writes],
            "steps": self.steps,
        }


def record_from_json(obj: dict) -> TxRecord:
    call = TxCall(
        caller=obj["call"]["caller"],
        function=obj["call"]["function"],
        args=tuple(value_from_json(a) for a in obj["call"]["args"]),
        value=obj["call"]["value"],
    )
    return TxRecord(
        call=call,
        status=TxStatus.from_json(obj["status"]),
        returns=tuple(value_from_json(v) for v in obj["returns"]),
        reads=tuple((k, ver) for k, ver in obj["reads"]),
        writes=tuple((k, value_from_json(v)) for k, v in obj["writes"]),
        steps=obj["steps"],
    )


class DeployError(Exception):
    def __init__(self, status: TxStatus):
        self.status = status
        super().__init__(f"deployment aborted: {status.kind}")


# ── ledger ───────────────────────────────────────────────────────────────


def balance_key(holder: str) -> str:
    name = "address(0)" if holder == ZERO_ADDRESS else holder
    return f"__native__.balance[{name}]"


class LedgerState:
    """Versioned key-value store plus the deployed contract."""

    def __init__(self) -> None:
        self.entries: dict[str, tuple[Value, int]] = {}
        self.contract: CheckedContract | None = None

    @classmethod
    def genesis(cls, actors: list[tuple[str, int]], width: int = 64) -> "LedgerState":
        """Fresh ledger with funded actor balances (each write at version 1)."""
        ledger = cls()
        balance_type = T.uint(width)
        for name, balance in actors:
            ledger.entries[balance_key(name)] = (Value(balance_type, balance), 1)
        return ledger

    def copy(self) -> "LedgerState":
        out = LedgerState()
        out.entries = dict(self.entries)
        out.contract = self.contract
        return out

    def get(self, key: str) -> tuple[Value, int] | None:
        return self.entries.get(key)

    def version(self, key: str) -> int:
        hit = self.entries.get(key)
        return hit[1] if hit is not None else 0

    def apply_writes(self, writes: dict[str, Value]) -> "LedgerState":
        out = self.copy()
        for key in sorted(writes):
            out.entries[key] = (writes[key], out.version(key) + 1)
        return out

    def dump(self) -> str:
        lines = [
            f"{key} = {render_value(value)} @{version}"
            for key, (value, version) in sorted(self.entries.items())
        ]
        return "\n".join(lines) + ("\n" if lines else "")

    def total_native(self) -> int:
        return sum(
            value.v for key, (value, _) in self.entries.items()  # type: ignore[misc]
            if key.startswith("__native__.balance[")
        )


# ── interpreter ──────────────────────────────────────────────────────────


class _Abort(Exception):
    def __init__(self, status: TxStatus):
        self.status = status


class _Return(Exception):
    def __init__(self, values: tuple[Value, ...]):
        self.values = values


class VmInternalError(Exception):
    """Raised when execution hits a state the type checker should prevent."""


@dataclass
class _Frame:
    fn: N.FunctionDef
    vars: dict[str, Value] = field(default_factory=dict)


class _Tx:
    def __init__(self, ledger: LedgerState, config: VmConfig,
                 caller: str, value: int, is_query: bool):
        checked = ledger.contract
        if checked is None:
            raise VmInternalError("no contract deployed on this ledger")
        self.checked = checked
        self.contract = checked.contract
        self.ledger = ledger
        self.config = config
        self.caller = caller
        self.value = value
        self.is_query = is_query
        self.cache: dict[str, Value] = {}
        self.reads: dict[str, int] = {}
        self.steps = 0
        if config.step_budget is not None:
            self._limit = config.step_budget
            self._overrun = TxStatus("aborted_gas")
        else:
            self._limit = config.timeout_budget
            self._overrun = TxStatus("aborted_timeout")

    # ── step accounting ───────────────────────────────────────────────

    def charge(self, n: int = 1) -> None:
        self.steps += n
        if self.steps > self._limit:
            self.steps = self._limit
            raise _Abort(self._overrun)

    # ── storage ───────────────────────────────────────────────────────

    def read_key(self, key: str, default_type: T.Type) -> Value:
        self.charge(STORAGE_COST)
        if key not in self.reads:
            self.reads[key] = self.ledger.version(key)
        if key in self.cache:
            return self.cache[key]
        hit = self.ledger.get(key)
        return hit[0] if hit is not None else zero_value(default_type)

    def write_key(self, key: str, value: Value) -> None:
        if self.is_query:
            raise VmInternalError("storage write inside a query")
        self.charge(STORAGE_COST)
        self.cache[key] = value

    def state_key(self, var: str, path: tuple[str, ...] = ()) -> str:
        key = f"{self.contract.name}.{var}"
        for p in path:
            key += f"[{p}]"
        return key

    # ── native balances ───────────────────────────────────────────────

    def get_balance(self, holder: str) -> int:
        val = self.read_key(balance_key(holder), T.uint(self.config.default_int_width))
        return int(val.v)  # type: ignore[arg-type]

    def set_balance(self, holder: str, amount: int) -> None:
        self.write_key(
            balance_key(holder),
            Value(T.uint(self.config.default_int_width), amount),
        )

    def move_native(self, src: str, dst: str, amount: int) -> None:
        src_bal = self.get_balance(src)
        if amount > src_bal:
            raise _Abort(TxStatus("aborted_builtin", reason="insufficient-balance"))
        dst_bal = self.get_balance(dst)
        self.set_balance(src, src_bal - amount)
        if dst == src:
            return
        self.set_balance(dst, dst_bal + amount)

    # ── function execution ────────────────────────────────────────────

    def run_function(self, fn: N.FunctionDef, args: tuple[Value, ...]) -> tuple[Value, ...]:
        frame = _Frame(fn)
        for p, a in zip(fn.params, args):
            frame.vars[p.name] = a
        try:
            self.exec_block(fn.body, frame)
        except _Return as r:
            return r.values
        # falling off the end yields zero values for each declared return type
        return tuple(zero_value(rt) for rt in fn.returns)

    def exec_block(self, block: N.Block, frame: _Frame) -> None:
        self.charge()
        for s in block.statements:
            self.exec_stmt(s, frame)

    def exec_stmt(self, s: N.Stmt, frame: _Frame) -> None:
        if isinstance(s, N.Block):
            self.exec_block(s, frame)
            return
        self.charge()
        if isinstance(s, N.LocalDecl):
            if s.init is not None:
                frame.vars[s.name] = self.eval(s.init, frame)
            else:
                frame.vars[s.name] = zero_value(s.type)
        elif isinstance(s, N.Assign):
            self.exec_assign(s, frame)
        elif isinstance(s, N.ExprStmt):
            self.eval_call(s.expr, frame, statement=True)  # type: ignore[arg-type]
        elif isinstance(s, N.If):
            cond = self.eval(s.cond, frame)
            if cond.v:
                self.exec_block(s.then, frame)
            elif isinstance(s.orelse, N.Block):
                self.exec_block(s.orelse, frame)
            elif isinstance(s.orelse, N.If):
                self.exec_stmt(s.orelse, frame)
        elif isinstance(s, N.While):
            while True:
                cond = self.eval(s.cond, frame)
                if not cond.v:
                    break
                self.exec_block(s.body, frame)
        elif isinstance(s, N.For):
            if s.init is not None:
                self.exec_stmt(s.init, frame)
            while True:
                if s.cond is not None:
                    cond = self.eval(s.cond, frame)
                    if not cond.v:
                        break
                self.exec_block(s.body, frame)
                if s.update is not None:
                    self.exec_stmt(s.update, frame)
        elif isinstance(s, N.Return):
            raise _Return(tuple(self.eval(v, frame) for v in s.values))
        elif isinstance(s, N.Require):
            cond = self.eval(s.cond, frame)
            if not cond.v:
                raise _Abort(TxStatus("aborted_require", message=s.message or ""))
        elif isinstance(s, N.Assert):
            cond = self.eval(s.cond, frame)
            if not cond.v:
                raise _Abort(TxStatus("aborted_assert"))
        elif isinstance(s, N.Revert):
            raise _Abort(TxStatus("aborted_revert", message=s.message or ""))
        else:  # pragma: no cover
            raise VmInternalError(f"unknown statement {type(s).__name__}")

    # ── assignment ────────────────────────────────────────────────────

    def exec_assign(self, s: N.Assign, frame: _Frame) -> None:
        if s.op == "=":
            value = self.eval(s.value, frame)
            self.store(s.target, value, frame)
            return
        current = self.load_target(s.target, frame)
        rhs = self.eval(s.value, frame)
        ty = current.type
        if not isinstance(ty, T.IntType):
            raise VmInternalError("compound assignment on non-integer")
        op = s.op[0]
        value = Value(ty, self._arith(op, int(current.v), int(rhs.v), ty))  # type: ignore[arg-type]
        self.store(s.target, value, frame)

    def _storage_root(self, e: N.Expr) -> str | None:
        """State-variable name if this lvalue/rvalue is rooted in storage."""
        node = e
        while isinstance(node, N.Index):
            node = node.base
        if isinstance(node, N.Ident):
            kind, name = self.checked.bindings.get(node.node_id, ("", ""))
            if kind == "state":
                return name
        return None

    def _index_chain(self, e: N.Expr) -> tuple[N.Ident, list[N.Index]]:
        chain: list[N.Index] = []
        node = e
        while isinstance(node, N.Index):
            chain.append(node)
            node = node.base
        assert isinstance(node, N.Ident)
        chain.reverse()
        return node, chain

    def load_target(self, e: N.Expr, frame: _Frame) -> Value:
        """Current value of an assignment target (for compound ops)."""
        return self.eval(e, frame)

    def store(self, target: N.Expr, value: Value, frame: _Frame) -> None:
        if isinstance(target, N.Ident):
            kind, name = self.checked.bindings[target.node_id]
            if kind == "state":
                self.write_key(self.state_key(name), value)
            else:
                frame.vars[name] = value
            return
        if isinstance(target, N.Index):
            root, chain = self._index_chain(target)
            kind, name = self.checked.bindings[root.node_id]
            if kind == "state":
                sv = self.checked.state_vars[name]
                if isinstance(sv.type, T.MappingType):
                    path, leaf_ty = self._mapping_path(sv.type, chain, frame)
                    self.write_key(self.state_key(name, path), value)
                    return
                # whole-array state variable: rewrite the stored array
                arr = self.read_key(self.state_key(name), sv.type)
                idx = self.eval(chain[0].index, frame)
                new_arr = self._array_with(arr, int(idx.v), value)  # type: ignore[arg-type]
                self.write_key(self.state_key(name), new_arr)
                return
            # local/param array element
            arr = frame.vars[name]
            idx = self.eval(chain[0].index, frame)
            frame.vars[name] = self._array_with(arr, int(idx.v), value)  # type: ignore[arg-type]
            return
        raise VmInternalError("bad assignment target")

    def _array_with(self, arr: Value, idx: int, value: Value) -> Value:
        items = arr.v
        assert isinstance(items, tuple)
        if idx < 0 or idx >= len(items):
            raise _Abort(TxStatus("aborted_builtin", reason="index-out-of-bounds"))
        return Value(arr.type, items[:idx] + (value,) + items[idx + 1:])

    def _mapping_path(self, ty: T.MappingType, chain: list[N.Index],
                      frame: _Frame) -> tuple[tuple[str, ...], T.Type]:
        path: list[str] = []
        cur: T.Type = ty
        for link in chain:
            assert isinstance(cur, T.MappingType)
            key = self.eval(link.index, frame)
            path.append(render_value(key))
            cur = cur.value
        return tuple(path), cur

    # ── expressions ───────────────────────────────────────────────────

    def eval(self, e: N.Expr, frame: _Frame) -> Value:
        self.charge()
        if isinstance(e, N.Literal):
            ty = self.checked.expr_types[e.node_id]
            if e.kind == "int":
                return Value(ty, int(e.value))  # type: ignore[arg-type]
            if e.kind == "bool":
                return Value(T.BOOL, bool(e.value))
            return Value(T.STRING, str(e.value))
        if isinstance(e, N.ArrayLit):
            ty = self.checked.expr_types[e.node_id]
            items = tuple(self.eval(x, frame) for x in e.elements)
            return Value(ty, items)
        if isinstance(e, N.Ident):
            kind, name = self.checked.bindings[e.node_id]
            if kind == "state":
                sv = self.checked.state_vars[name]
                if isinstance(sv.type, T.MappingType):
                    raise VmInternalError("bare mapping read")
                return self.read_key(self.state_key(name), sv.type)
            return frame.vars[name]
        if isinstance(e, N.MsgSender):
            return addrval(self.caller)
        if isinstance(e, N.MsgValue):
            return Value(T.uint(self.config.default_int_width), self.value)
        if isinstance(e, N.ZeroAddress):
            return addrval(ZERO_ADDRESS)
        if isinstance(e, N.Index):
            root_var = self._storage_root(e)
            if root_var is not None:
                sv = self.checked.state_vars[root_var]
                if isinstance(sv.type, T.MappingType):
                    root, chain = self._index_chain(e)
                    path, leaf_ty = self._mapping_path(sv.type, chain, frame)
                    return self.read_key(self.state_key(root_var, path), leaf_ty)
            base = self.eval(e.base, frame)
            idx = self.eval(e.index, frame)
            items = base.v
            assert isinstance(items, tuple)
            i = int(idx.v)  # type: ignore[arg-type]
            if i < 0 or i >= len(items):
                raise _Abort(TxStatus("aborted_builtin", reason="index-out-of-bounds"))
            return items[i]
        if isinstance(e, N.Member):
            base = self.eval(e.base, frame)
            width = self.config.default_int_width
            return Value(T.uint(width), len(base.v))  # type: ignore[arg-type]
        if isinstance(e, N.Unary):
            operand = self.eval(e.operand, frame)
            if e.op == "!":
                return Value(T.BOOL, not operand.v)
            ty = operand.type
            assert isinstance(ty, T.IntType)
            return Value(ty, ty.wrap(-int(operand.v)))  # type: ignore[arg-type]
        if isinstance(e, N.Binary):
            return self.eval_binary(e, frame)
        if isinstance(e, N.Call):
            result = self.eval_call(e, frame, statement=False)
            assert result is not None
            return result
        raise VmInternalError(f"unknown expression {type(e).__name__}")

    def eval_binary(self, e: N.Binary, frame: _Frame) -> Value:
        op = e.op
        if op == "&&":
            left = self.eval(e.left, frame)
            if not left.v:
                return Value(T.BOOL, False)
            return Value(T.BOOL, bool(self.eval(e.right, frame).v))
        if op == "||":
            left = self.eval(e.left, frame)
            if left.v:
                return Value(T.BOOL, True)
            return Value(T.BOOL, bool(self.eval(e.right, frame).v))
        left = self.eval(e.left, frame)
        right = self.eval(e.right, frame)
        if op in ("+", "-", "*", "/", "%"):
            ty = left.type
            assert isinstance(ty, T.IntType)
            return Value(ty, self._arith(op, int(left.v), int(right.v), ty))  # type: ignore[arg-type]
        if op in ("<", "<=", ">", ">="):
            lv, rv = int(left.v), int(right.v)  # type: ignore[arg-type]
            return Value(T.BOOL, {
                "<": lv < rv, "<=": lv <= rv, ">": lv > rv, ">=": lv >= rv,
            }[op])
        if op == "==":
            return Value(T.BOOL, left.v == right.v)
        if op == "!=":
            return Value(T.BOOL, left.v != right.v)
        raise VmInternalError(f"unknown operator {op!r}")

    def _arith(self, op: str, a: int, b: int, ty: T.IntType) -> int:
        if op == "+":
            return ty.wrap(a + b)
        if op == "-":
            return ty.wrap(a - b)
        if op == "*":
            return ty.wrap(a * b)
        if b == 0:
            raise _Abort(TxStatus("aborted_builtin", reason="division-by-zero"))
        q = abs(a) // abs(b)
        if (a < 0) != (b < 0):
            q = -q
        if op == "/":
            return ty.wrap(q)
        return ty.wrap(a - q * b)  # remainder takes the dividend's sign

    def eval_call(self, e: N.Call, frame: _Frame, statement: bool) -> Value | None:
        if e.name in SAFE_MATH_FNS:
            left = self.eval(e.args[0], frame)
            right = self.eval(e.args[1], frame)
            ty = left.type
            assert isinstance(ty, T.IntType)
            a, b = int(left.v), int(right.v)  # type: ignore[arg-type]
            exact = {"safeAdd": a + b, "safeSub": a - b, "safeMul": a * b}[e.name]
            if self.config.checked_arithmetic and not ty.contains(exact):
                raise _Abort(TxStatus("aborted_builtin", reason="checked-overflow"))
            return Value(ty, ty.wrap(exact))
        if e.name == "transfer" and "transfer" not in self.checked.functions:
            to = self.eval(e.args[0], frame)
            amount = self.eval(e.args[1], frame)
            self.move_native(self.contract.name, str(to.v), int(amount.v))  # type: ignore[arg-type]
            return None
        fn = self.checked.functions[e.name]
        args = tuple(self.eval(a, frame) for a in e.args)
        values = self.run_function(fn, args)
        if statement:
            return values[0] if len(values) == 1 else None
        return values[0]


def _finish(tx: _Tx, status: TxStatus, returns: tuple[Value, ...],
            call: TxCall, ledger: LedgerState) -> tuple[TxRecord, LedgerState]:
    if status.committed:
        writes = tuple(sorted(tx.cache.items()))
        new_ledger = ledger.apply_writes(tx.cache)
    else:
        writes = ()
        new_ledger = ledger
    record = TxRecord(
        call=call,
        status=status,
        returns=returns if status.committed else (),
        reads=tuple(sorted(tx.reads.items())),
        writes=writes,
        steps=tx.steps,
    )
    return record, new_ledger


def execute(call: TxCall, ledger: LedgerState, config: VmConfig) -> tuple[TxRecord, LedgerState]:
    """Run a transaction function call; total — every error becomes a status."""
    checked = ledger.contract
    if checked is None:
        raise VmInternalError("no contract deployed on this ledger")
    fn = checked.functions[call.function]
    tx = _Tx(ledger, config, call.caller, call.value, is_query=False)
    try:
        if call.value > 0:
            tx.move_native(call.caller, checked.contract.name, call.value)
        returns = tx.run_function(fn, call.args)
        return _finish(tx, COMMITTED, returns, call, ledger)
    except _Abort as a:
        return _finish(tx, a.status, (), call, ledger)


def query(call: TxCall, ledger: LedgerState, config: VmConfig) -> TxRecord:
    """Run a query function call; the ledger is never modified."""
    checked = ledger.contract
    if checked is None:
        raise VmInternalError("no contract deployed on this ledger")
    fn = checked.functions[call.function]
    if fn.mutability != "query":
        raise VmInternalError(f"{call.function} is not a query function")
    tx = _Tx(ledger, config, call.caller, 0, is_query=True)
    try:
        returns = tx.run_function(fn, call.args)
        record, _ = _finish(tx, COMMITTED, returns, call, ledger)
    except _Abort as a:
        record, _ = _finish(tx, a.status, (), call, ledger)
    return record


def deploy(checked: CheckedContract, ledger: LedgerState, config: VmConfig,
           deployer: str = "owner",
           args: tuple[Value, ...] = ()) -> LedgerState:
    """Install the contract and run its constructor as one transaction.

    Raises DeployError (wrapping the abort status) and leaves the input
    ledger unchanged if the constructor aborts.
    """
    staged = ledger.copy()
    staged.contract = checked
    tx = _Tx(staged, config, deployer, 0, is_query=False)
    try:
        contract_name = checked.contract.name
        tx.set_balance(contract_name, tx.get_balance(contract_name))
        frame = _Frame(checked.constructor or N.FunctionDef(
            "constructor", [], [], "public", "transaction", N.Block([]), True))
        for sv in checked.contract.state_vars:
            if isinstance(sv.type, T.MappingType):
                continue
            if sv.init is not None:
                value = tx.eval(sv.init, frame)
            else:
                value = zero_value(sv.type)
            tx.write_key(tx.state_key(sv.name), value)
        ctor = checked.constructor
        if ctor is not None:
            tx.run_function(ctor, args)
    except _Abort as a:
        raise DeployError(a.status) from None
    return staged.apply_writes(tx.cache)
