"""Declarative catalog of fault operators.

Each operator pairs a condition (is this node a legal injection site?) with
an action (the single edit producing the faulty tree) and, for "wrong"
operators, an enumeration of replacement alternatives. "Missing" operators
always have exactly one alternative.

Catalog membership: ten generic operator types carried over from the
classic ODC-derived software fault model, plus eighteen operators specific
to smart contracts (access-control and input-validation check removal and
distortion, safe-arithmetic call removal, visibility widening). Assert
statements are never injection sites: they model added protections and
only their supporting code is subject to faults.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .lang import nodes as N
from .lang import types as T
from .lang.errors import TypeCheckError
from .lang.parser import parse
from .lang.printer import print_contract
from .lang.typecheck import SAFE_MATH_FNS, CheckedContract, check

CATALOG_VERSION = "1"


class SiteMismatch(Exception):
    pass


class IllegalMutant(Exception):
    """The edit produced a tree that no longer type-checks."""


# ── site context ─────────────────────────────────────────────────────────


class SiteContext:
    """Parent links and derived predicates for one checked contract."""

    def __init__(self, checked: CheckedContract):
        self.checked = checked
        self.parent: dict[int, tuple[N.Node, str, Optional[int]]] = {}
        self.in_assert: set[int] = set()
        self._index(checked.contract)
        for node in N.walk(checked.contract):
            if isinstance(node, N.Assert):
                for inner in N.walk(node):
                    self.in_assert.add(inner.node_id)

    def _index(self, root: N.Node) -> None:
        from dataclasses import fields as dc_fields
        for node in N.walk(root):
            for f in dc_fields(node):  # type: ignore[arg-type]
                v = getattr(node, f.name)
                if isinstance(v, N.Node):
                    self.parent[v.node_id] = (node, f.name, None)
                elif isinstance(v, list):
                    for i, x in enumerate(v):
                        if isinstance(x, N.Node):
                            self.parent[x.node_id] = (node, f.name, i)

    def parent_of(self, node: N.Node) -> tuple[N.Node, str, Optional[int]] | None:
        return self.parent.get(node.node_id)

    def injectable(self, node: N.Node) -> bool:
        return node.node_id not in self.in_assert

    def in_block_list(self, node: N.Node) -> bool:
        hit = self.parent_of(node)
        return hit is not None and isinstance(hit[0], N.Block) and hit[1] == "statements"

    def is_if_condition(self, node: N.Node) -> bool:
        hit = self.parent_of(node)
        return hit is not None and isinstance(hit[0], N.If) and hit[1] == "cond"

    def is_for_update(self, node: N.Node) -> bool:
        hit = self.parent_of(node)
        return hit is not None and isinstance(hit[0], N.For) and hit[1] == "update"

    def references_sender(self, expr: N.Node) -> bool:
        return self.checked.references_sender(expr)

    def references_param(self, expr: N.Node) -> bool:
        return self.checked.references_param(expr)


def flatten_logical(expr: N.Expr, op: str) -> list[N.Expr]:
    """Operand list of a top-level &&/|| chain (length 1 if not that chain)."""
    if isinstance(expr, N.Binary) and expr.op == op:
        return flatten_logical(expr.left, op) + flatten_logical(expr.right, op)
    return [expr]


def rebuild_logical(operands: list[N.Expr], op: str) -> N.Expr:
    out = operands[0]
    for nxt in operands[1:]:
        node = N.Binary(op, out, nxt)
        node.pos = nxt.pos
        out = node
    return out


_CMP_FLIP = {"<": "<=", "<=": "<", ">": ">=", ">=": ">", "==": "!=", "!=": "=="}
_ARITH_SWAP = {"+": "-", "-": "+", "*": "/", "/": "*"}


def _cmp_nodes(expr: N.Expr) -> list[N.Binary]:
    return [
        n for n in N.walk(expr)
        if isinstance(n, N.Binary) and n.op in _CMP_FLIP
    ]


def condition_alternative_count(expr: N.Expr) -> int:
    """Replacements for a wrong-logical-expression site: negate the whole
    condition, then flip each comparison operator to its off-by-one
    neighbour (or ==/!= swap)."""
    return 1 + len(_cmp_nodes(expr))


def apply_condition_alternative(expr: N.Expr, alt: int) -> N.Expr:
    """Return the replacement expression for alternative ``alt`` (edits a
    clone, never the input)."""
    if alt == 0:
        negated = N.Unary("!", N.clone(expr))  # type: ignore[arg-type]
        negated.pos = expr.pos
        return negated
    new_expr = N.clone(expr)
    target = _cmp_nodes(new_expr)[alt - 1]  # type: ignore[arg-type]
    target.op = _CMP_FLIP[target.op]
    return new_expr  # type: ignore[return-value]


def _arith_nodes(expr: N.Expr) -> list[N.Binary]:
    return [
        n for n in N.walk(expr)
        if isinstance(n, N.Binary) and n.op in ("+", "-", "*", "/", "%")
    ]


def _wvae_options(rhs: N.Expr) -> list[tuple[int, str]]:
    """(arith-node ordinal, kind) pairs; kind is "swap", "left1" or "right1"."""
    options: list[tuple[int, str]] = []
    for i, b in enumerate(_arith_nodes(rhs)):
        if b.op in _ARITH_SWAP:
            options.append((i, "swap"))
        if not (isinstance(b.left, N.Literal) and b.left.value == 1):
            options.append((i, "left1"))
        if not (isinstance(b.right, N.Literal) and b.right.value == 1):
            options.append((i, "right1"))
    return options


# ── statement read/write sets (for the reordering operator) ──────────────


def _names_read(node: N.Node, checked: CheckedContract) -> set[str] | None:
    """Variable names read by an expression; None marks "anything" (a call
    with side effects or unknown footprint)."""
    out: set[str] = set()
    for n in N.walk(node):
        if isinstance(n, N.Call) and n.name not in SAFE_MATH_FNS:
            return None
        if isinstance(n, N.Ident):
            out.add(self_name(n, checked))
        if isinstance(n, (N.MsgSender, N.MsgValue)):
            out.add("msg")
    return out


def self_name(n: N.Ident, checked: CheckedContract) -> str:
    kind, name = checked.bindings.get(n.node_id, ("?", n.name))
    return f"{kind}:{name}"


def _stmt_footprint(s: N.Stmt, checked: CheckedContract) -> tuple[set[str], set[str]] | None:
    """(reads, writes) at variable granularity, or None if not reorderable."""
    if isinstance(s, N.LocalDecl):
        reads = _names_read(s.init, checked) if s.init is not None else set()
        if reads is None:
            return None
        return reads, {f"local:{s.name}"}
    if isinstance(s, N.Assign):
        root = s.target
        index_reads: set[str] = set()
        while isinstance(root, N.Index):
            r = _names_read(root.index, checked)
            if r is None:
                return None
            index_reads |= r
            root = root.base
        if not isinstance(root, N.Ident):
            return None
        value_reads = _names_read(s.value, checked)
        if value_reads is None:
            return None
        writes = {self_name(root, checked)}
        reads = value_reads | index_reads
        if s.op != "=":
            reads = reads | writes
        return reads, writes
    return None


def swappable(a: N.Stmt, b: N.Stmt, checked: CheckedContract) -> bool:
    fa = _stmt_footprint(a, checked)
    fb = _stmt_footprint(b, checked)
    if fa is None or fb is None:
        return False
    reads_a, writes_a = fa
    reads_b, writes_b = fb
    return not (writes_a & (reads_b | writes_b)) and not (writes_b & reads_a)


# ── operator definitions ─────────────────────────────────────────────────


@dataclass(frozen=True)
class FaultOperator:
    code: str
    title: str
    origin: str          # "generic" | "specific"
    odc_type: str        # assignment | checking | interface | algorithm | function
    qualifier: str       # missing | wrong | extraneous
    condition: Callable[[SiteContext, N.Node], bool]
    action: Callable[[SiteContext, N.Node, int], None]
    alternative_count: Callable[[SiteContext, N.Node], int] = lambda ctx, n: 1


def matches(op: FaultOperator, node: N.Node, ctx: SiteContext) -> bool:
    """True iff the node is a legal injection site for the operator."""
    return ctx.injectable(node) and op.condition(ctx, node)


# actions edit the (cloned) tree in place through the clone's own context


def _remove_stmt(ctx: SiteContext, node: N.Node, alt: int = 0) -> None:
    parent, fname, idx = ctx.parent[node.node_id]
    assert isinstance(parent, N.Block) and idx is not None
    parent.statements.pop(idx)


def _unwrap_if(ctx: SiteContext, node: N.Node, alt: int = 0) -> None:
    assert isinstance(node, N.If)
    parent, fname, idx = ctx.parent[node.node_id]
    if isinstance(parent, N.Block) and idx is not None:
        parent.statements[idx:idx + 1] = list(node.then.statements)
    elif isinstance(parent, N.If) and fname == "orelse":
        parent.orelse = node.then
    else:  # pragma: no cover - grammar places ifs only in those spots
        raise SiteMismatch("if statement in unexpected position")


def _drop_init(ctx: SiteContext, node: N.Node, alt: int = 0) -> None:
    assert isinstance(node, (N.StateVar, N.LocalDecl))
    node.init = None


def _drop_loop_update(ctx: SiteContext, node: N.Node, alt: int = 0) -> None:
    parent, fname, _ = ctx.parent[node.node_id]
    assert isinstance(parent, N.For) and fname == "update"
    parent.update = None


def _replace_expr(ctx: SiteContext, old: N.Node, new: N.Expr) -> None:
    parent, fname, idx = ctx.parent[old.node_id]
    if idx is None:
        setattr(parent, fname, new)
    else:
        getattr(parent, fname)[idx] = new


def _swap_with_next(ctx: SiteContext, node: N.Node, alt: int = 0) -> None:
    parent, fname, idx = ctx.parent[node.node_id]
    assert isinstance(parent, N.Block) and idx is not None
    stmts = parent.statements
    stmts[idx], stmts[idx + 1] = stmts[idx + 1], stmts[idx]


def _widen_visibility(ctx: SiteContext, node: N.Node, alt: int = 0) -> None:
    assert isinstance(node, N.FunctionDef)
    node.visibility = "public"


def _condition_site_action(ctx: SiteContext, node: N.Node, alt: int) -> None:
    _replace_expr(ctx, node, apply_condition_alternative(node, alt))  # type: ignore[arg-type]


def _drop_logical_operand(op_text: str, want_sender: bool):
    def action(ctx: SiteContext, node: N.Node, alt: int = 0) -> None:
        operands = flatten_logical(node, op_text)  # type: ignore[arg-type]
        refs = ctx.references_sender if want_sender else ctx.references_param
        keep = [x for x in operands]
        for i, x in enumerate(operands):
            if refs(x):
                keep.pop(i)
                break
        _replace_expr(ctx, node, rebuild_logical(keep, op_text))
    return action


def _wvae_action(ctx: SiteContext, node: N.Node, alt: int) -> None:
    assert isinstance(node, N.Assign)
    ordinal, kind = _wvae_options(node.value)[alt]
    target = _arith_nodes(node.value)[ordinal]
    if kind == "swap":
        target.op = _ARITH_SWAP[target.op]
        return
    one = N.Literal("int", 1)
    one.pos = target.pos
    if kind == "left1":
        target.left = one
    else:
        target.right = one


def _mcsm_action(ctx: SiteContext, node: N.Node, alt: int = 0) -> None:
    assert isinstance(node, N.Call)
    op_map = {"safeAdd": "+", "safeSub": "-", "safeMul": "*"}
    plain = N.Binary(op_map[node.name], node.args[0], node.args[1])
    plain.pos = node.pos
    _replace_expr(ctx, node, plain)


# condition helpers


def _is_call_stmt(ctx: SiteContext, n: N.Node) -> bool:
    return (isinstance(n, N.ExprStmt) and isinstance(n.expr, N.Call)
            and ctx.in_block_list(n))


def _has_initializer(ctx: SiteContext, n: N.Node) -> bool:
    return isinstance(n, (N.StateVar, N.LocalDecl)) and n.init is not None


def _is_expr_assignment(ctx: SiteContext, n: N.Node) -> bool:
    return (isinstance(n, N.Assign) and n.op == "="
            and not isinstance(n.value, N.Literal)
            and ctx.in_block_list(n))


def _is_require_cond(ctx: SiteContext, n: N.Node) -> bool:
    hit = ctx.parent_of(n)
    return hit is not None and isinstance(hit[0], N.Require) and hit[1] == "cond"


def _require_over(want_sender: bool):
    def cond(ctx: SiteContext, n: N.Node) -> bool:
        if not isinstance(n, N.Require):
            return False
        refs = ctx.references_sender if want_sender else ctx.references_param
        return refs(n.cond)
    return cond


def _chain_with_operand(stmt_kind: str, op_text: str, want_sender: bool):
    """Require/if condition that is a top-level &&/|| chain with a removable
    operand referencing the sender (or an input variable)."""
    def cond(ctx: SiteContext, n: N.Node) -> bool:
        if stmt_kind == "require":
            if not _is_require_cond(ctx, n):
                return False
        else:
            if not ctx.is_if_condition(n):
                return False
        operands = flatten_logical(n, op_text)  # type: ignore[arg-type]
        if len(operands) < 2:
            return False
        refs = ctx.references_sender if want_sender else ctx.references_param
        return any(refs(x) for x in operands)
    return cond


def _cond_expr_over(stmt_kind: str, want_sender: bool):
    def cond(ctx: SiteContext, n: N.Node) -> bool:
        if stmt_kind == "require":
            if not _is_require_cond(ctx, n):
                return False
        else:
            if not ctx.is_if_condition(n):
                return False
        refs = ctx.references_sender if want_sender else ctx.references_param
        return refs(n)
    return cond


def _guard_plus_statements(want_sender: bool):
    def cond(ctx: SiteContext, n: N.Node) -> bool:
        if not isinstance(n, N.If) or not ctx.in_block_list(n):
            return False
        refs = ctx.references_sender if want_sender else ctx.references_param
        return refs(n.cond)
    return cond


def _walr_cond(ctx: SiteContext, n: N.Node) -> bool:
    if not isinstance(n, (N.Assign, N.LocalDecl)) or not ctx.in_block_list(n):
        return False
    parent, _, idx = ctx.parent[n.node_id]
    assert isinstance(parent, N.Block) and idx is not None
    if idx + 1 >= len(parent.statements):
        return False
    nxt = parent.statements[idx + 1]
    if nxt.node_id in ctx.in_assert:
        return False
    return swappable(n, nxt, ctx.checked)


def _cond_alt_count(ctx: SiteContext, n: N.Node) -> int:
    return condition_alternative_count(n)  # type: ignore[arg-type]


def _require_cond_alt_count(ctx: SiteContext, n: N.Node) -> int:
    return condition_alternative_count(n.cond)  # type: ignore[union-attr, arg-type]


OPERATORS: tuple[FaultOperator, ...] = (
    # generic (ODC-derived)
    FaultOperator(
        "MFC", "missing function call", "generic", "function", "missing",
        _is_call_stmt, _remove_stmt),
    FaultOperator(
        "MVIV", "missing variable initialization", "generic", "assignment", "missing",
        _has_initializer, _drop_init),
    FaultOperator(
        "MVAE", "missing variable assignment using an expression", "generic",
        "assignment", "missing",
        _is_expr_assignment, _remove_stmt),
    FaultOperator(
        "MIA", "missing if construct around statement", "generic", "checking", "missing",
        lambda ctx, n: isinstance(n, N.If), _unwrap_if),
    FaultOperator(
        "MRS", "missing return statement", "generic", "algorithm", "missing",
        lambda ctx, n: isinstance(n, N.Return) and ctx.in_block_list(n),
        _remove_stmt),
    FaultOperator(
        "MLC", "missing loop-variable update", "generic", "algorithm", "missing",
        lambda ctx, n: isinstance(n, N.Assign) and ctx.is_for_update(n),
        _drop_loop_update),
    FaultOperator(
        "WLEC", "wrong logical expression used as branch condition", "generic",
        "checking", "wrong",
        lambda ctx, n: ctx.is_if_condition(n),
        _condition_site_action, _cond_alt_count),
    FaultOperator(
        "WLEP", "wrong logical expression in parameters of function call", "generic",
        "interface", "wrong",
        lambda ctx, n: _is_require_cond(ctx, n),
        _condition_site_action, _cond_alt_count),
    FaultOperator(
        "WVAE", "wrong arithmetic expression used in assignment", "generic",
        "assignment", "wrong",
        lambda ctx, n: isinstance(n, N.Assign) and n.op == "="
        and bool(_wvae_options(n.value)),
        _wvae_action,
        lambda ctx, n: len(_wvae_options(n.value))),  # type: ignore[union-attr]
    FaultOperator(
        "WALR", "wrong algorithm: statement reordering", "generic",
        "algorithm", "wrong",
        _walr_cond, _swap_with_next),
    # smart-contract-specific
    FaultOperator(
        "MRTS", "missing require on transaction sender", "specific",
        "checking", "missing",
        _require_over(want_sender=True), _remove_stmt),
    FaultOperator(
        "MRIV", "missing require on input variable(s)", "specific",
        "checking", "missing",
        _require_over(want_sender=False), _remove_stmt),
    FaultOperator(
        "MROTS", "missing require OR subexpression on transaction sender",
        "specific", "checking", "missing",
        _chain_with_operand("require", "||", True),
        _drop_logical_operand("||", True)),
    FaultOperator(
        "MROIV", "missing require OR subexpression on input variable(s)",
        "specific", "checking", "missing",
        _chain_with_operand("require", "||", False),
        _drop_logical_operand("||", False)),
    FaultOperator(
        "MIOTS", "missing if OR subexpression on transaction sender",
        "specific", "checking", "missing",
        _chain_with_operand("if", "||", True),
        _drop_logical_operand("||", True)),
    FaultOperator(
        "MIOIV", "missing if OR subexpression on input variable(s)",
        "specific", "checking", "missing",
        _chain_with_operand("if", "||", False),
        _drop_logical_operand("||", False)),
    FaultOperator(
        "MRATS", "missing require AND subexpression on transaction sender",
        "specific", "checking", "missing",
        _chain_with_operand("require", "&&", True),
        _drop_logical_operand("&&", True)),
    FaultOperator(
        "MIATS", "missing if AND subexpression on transaction sender",
        "specific", "checking", "missing",
        _chain_with_operand("if", "&&", True),
        _drop_logical_operand("&&", True)),
    FaultOperator(
        "MRAIV", "missing require AND subexpression on input variable(s)",
        "specific", "checking", "missing",
        _chain_with_operand("require", "&&", False),
        _drop_logical_operand("&&", False)),
    FaultOperator(
        "MIAIV", "missing if AND subexpression on input variable(s)",
        "specific", "checking", "missing",
        _chain_with_operand("if", "&&", False),
        _drop_logical_operand("&&", False)),
    FaultOperator(
        "WRIV", "wrong logical expression in require over input variable(s)",
        "specific", "checking", "wrong",
        _cond_expr_over("require", False),
        _condition_site_action, _cond_alt_count),
    FaultOperator(
        "WIIV", "wrong logical expression in if over input variable(s)",
        "specific", "checking", "wrong",
        _cond_expr_over("if", False),
        _condition_site_action, _cond_alt_count),
    FaultOperator(
        "WRTS", "wrong logical expression in require over transaction sender",
        "specific", "checking", "wrong",
        _cond_expr_over("require", True),
        _condition_site_action, _cond_alt_count),
    FaultOperator(
        "WITS", "wrong logical expression in if over transaction sender",
        "specific", "checking", "wrong",
        _cond_expr_over("if", True),
        _condition_site_action, _cond_alt_count),
    FaultOperator(
        "PVPF", "wrong visibility (public) for private/internal function",
        "specific", "interface", "wrong",
        lambda ctx, n: isinstance(n, N.FunctionDef)
        and n.visibility in ("private", "internal") and not n.is_constructor,
        _widen_visibility),
    FaultOperator(
        "MCSM", "missing calls to SafeMath", "specific", "function", "missing",
        lambda ctx, n: isinstance(n, N.Call) and n.name in SAFE_MATH_FNS,
        _mcsm_action),
    FaultOperator(
        "MITSS", "missing if construct on transaction sender plus statements",
        "specific", "algorithm", "missing",
        _guard_plus_statements(want_sender=True), _remove_stmt),
    FaultOperator(
        "MIIVS", "missing if construct on input variable(s) plus statements",
        "specific", "algorithm", "missing",
        _guard_plus_statements(want_sender=False), _remove_stmt),
)

_BY_CODE = {op.code: op for op in OPERATORS}

EXCLUDED_NOTE = (
    "generic operators beyond those named in running text are omitted; "
    "their exact membership in the image-only fault table is unrecoverable"
)


@dataclass
class CatalogManifest:
    version: str = CATALOG_VERSION
    enabled: dict[str, bool] = field(default_factory=dict)
    excluded_note: str = EXCLUDED_NOTE

    @property
    def operators(self) -> list[FaultOperator]:
        return [op for op in OPERATORS if self.enabled.get(op.code, False)]

    def to_text(self) -> str:
        lines = [
            f"# fault operator manifest, version {self.version}",
            f"# excluded: {self.excluded_note}",
            "# code | origin | odc_type | qualifier | enabled",
        ]
        for op in OPERATORS:
            flag = "true" if self.enabled.get(op.code, False) else "false"
            lines.append(
                f"{op.code} | {op.origin} | {op.odc_type} | {op.qualifier} | {flag}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CatalogManifest":
        manifest = cls(enabled={})
        version = CATALOG_VERSION
        for line in text.splitlines():
            line = line.strip()
            if line.startswith("# fault operator manifest"):
                version = line.rsplit(" ", 1)[-1]
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split("|")]
            if len(parts) != 5:
                raise ValueError(f"bad manifest line: {line!r}")
            code, _, _, _, flag = parts
            if code not in _BY_CODE:
                raise ValueError(f"unknown operator code {code!r}")
            manifest.enabled[code] = flag == "true"
        manifest.version = version
        return manifest


def catalog(only: tuple[str, ...] = (), disable: tuple[str, ...] = ()) -> CatalogManifest:
    """The full registered catalog; ``only``/``disable`` adjust enabled flags."""
    for code in tuple(only) + tuple(disable):
        if code not in _BY_CODE:
            raise KeyError(f"unknown operator code {code!r}")
    manifest = CatalogManifest()
    for op in OPERATORS:
        on = True
        if only:
            on = op.code in only
        if op.code in disable:
            on = False
        manifest.enabled[op.code] = on
    return manifest


def operator(code: str) -> FaultOperator:
    if code not in _BY_CODE:
        raise KeyError(f"unknown operator code {code!r}")
    return _BY_CODE[code]


def alternative_count(op: FaultOperator, node: N.Node, ctx: SiteContext) -> int:
    return op.alternative_count(ctx, node)


def apply(op: FaultOperator, checked: CheckedContract, site: int,
          alt: int = 0) -> N.Contract:
    """Apply the operator's edit at the site, returning a fresh checked-able
    AST (reparsed from its own printed source). The input AST is unmodified.

    Raises SiteMismatch when the node fails the operator condition and
    IllegalMutant when the edited tree no longer compiles.
    """
    ctx = SiteContext(checked)
    try:
        node = N.find_node(checked.contract, site)
    except KeyError:
        raise SiteMismatch(f"no node {site}") from None
    if not matches(op, node, ctx):
        raise SiteMismatch(f"{op.code} does not match node {site}")
    n_alts = alternative_count(op, node, ctx)
    if not 0 <= alt < n_alts:
        raise SiteMismatch(f"{op.code} at node {site} has {n_alts} alternatives")
    mutated = N.clone(checked.contract)
    mctx = SiteContext(CheckedContract(mutated, checked.expr_types,
                                       checked.bindings, checked.fn_of,
                                       checked.functions, checked.state_vars))
    target = N.find_node(mutated, site)
    op.action(mctx, target, alt)
    N.renumber(mutated)
    source = print_contract(mutated)  # type: ignore[arg-type]
    try:
        reparsed = parse(source)
        check(reparsed)
    except TypeCheckError as exc:
        raise IllegalMutant(f"{op.code} at node {site}/{alt}: {exc}") from None
    return reparsed
