"""Independent injection-site walker.

Naive per-operator site counting written directly against the grammar,
reimplemented from scratch (no SiteContext, no catalog predicates) so the
engine's site enumeration can be checked against a second opinion.
"""

from __future__ import annotations

from solfault.lang import nodes as N
from solfault.lang.typecheck import CheckedContract

SAFE_CALLS = ("safeAdd", "safeSub", "safeMul")


def _exprs_in(node):
    yield from N.walk(node)


def _mentions_sender(expr) -> bool:
    return any(isinstance(x, N.MsgSender) for x in _exprs_in(expr))


def _mentions_param(expr, params: set[str], locals_seen: set[str]) -> bool:
    for x in _exprs_in(expr):
        if isinstance(x, N.Ident) and x.name in params and x.name not in locals_seen:
            return True
    return False


def _or_operands(expr, op):
    if isinstance(expr, N.Binary) and expr.op == op:
        return _or_operands(expr.left, op) + _or_operands(expr.right, op)
    return [expr]


def _cmp_count(expr) -> int:
    return sum(
        1 for x in _exprs_in(expr)
        if isinstance(x, N.Binary) and x.op in ("<", "<=", ">", ">=", "==", "!=")
    )


def _assert_ids(contract) -> set[int]:
    ids: set[int] = set()
    for node in N.walk(contract):
        if isinstance(node, N.Assert):
            ids.update(x.node_id for x in N.walk(node))
    return ids


def count_sites(checked: CheckedContract) -> dict[str, int]:
    """Number of (site, alternative) pairs per operator code."""
    c = checked.contract
    protected = _assert_ids(c)
    counts = {code: 0 for code in (
        "MFC", "MVIV", "MVAE", "MIA", "MRS", "MLC", "WLEC", "WLEP", "WVAE",
        "WALR", "MRTS", "MRIV", "MROTS", "MROIV", "MIOTS", "MIOIV", "MRATS",
        "MIATS", "MRAIV", "MIAIV", "WRIV", "WIIV", "WRTS", "WITS", "PVPF",
        "MCSM", "MITSS", "MIIVS",
    )}

    for fn in c.functions:
        if not fn.is_constructor and fn.visibility in ("private", "internal"):
            counts["PVPF"] += 1
        params = {p.name for p in fn.params}
        # locals shadowing params are impossible (checker), so no tracking
        for node in N.walk(fn):
            if node.node_id in protected:
                continue
            if isinstance(node, N.Call) and node.name in SAFE_CALLS:
                counts["MCSM"] += 1
            if isinstance(node, N.Return):
                counts["MRS"] += 1
            if isinstance(node, (N.StateVar, N.LocalDecl)) and node.init is not None:
                counts["MVIV"] += 1
            if isinstance(node, N.Require):
                cond = node.cond
                sender = _mentions_sender(cond)
                param = _mentions_param(cond, params, set())
                if sender:
                    counts["MRTS"] += 1
                    counts["WRTS"] += 1 + _cmp_count(cond)
                if param:
                    counts["MRIV"] += 1
                    counts["WRIV"] += 1 + _cmp_count(cond)
                counts["WLEP"] += 1 + _cmp_count(cond)
                ors = _or_operands(cond, "||")
                if len(ors) > 1:
                    if any(_mentions_sender(x) for x in ors):
                        counts["MROTS"] += 1
                    if any(_mentions_param(x, params, set()) for x in ors):
                        counts["MROIV"] += 1
                ands = _or_operands(cond, "&&")
                if len(ands) > 1:
                    if any(_mentions_sender(x) for x in ands):
                        counts["MRATS"] += 1
                    if any(_mentions_param(x, params, set()) for x in ands):
                        counts["MRAIV"] += 1
            if isinstance(node, N.If):
                counts["MIA"] += 1
                cond = node.cond
                counts["WLEC"] += 1 + _cmp_count(cond)
                if _mentions_sender(cond):
                    counts["MITSS"] += 1
                    counts["WITS"] += 1 + _cmp_count(cond)
                if _mentions_param(cond, params, set()):
                    counts["MIIVS"] += 1
                    counts["WIIV"] += 1 + _cmp_count(cond)
                ors = _or_operands(cond, "||")
                if len(ors) > 1:
                    if any(_mentions_sender(x) for x in ors):
                        counts["MIOTS"] += 1
                    if any(_mentions_param(x, params, set()) for x in ors):
                        counts["MIOIV"] += 1
                ands = _or_operands(cond, "&&")
                if len(ands) > 1:
                    if any(_mentions_sender(x) for x in ands):
                        counts["MIATS"] += 1
                    if any(_mentions_param(x, params, set()) for x in ands):
                        counts["MIAIV"] += 1

    for sv in c.state_vars:
        if sv.init is not None:
            counts["MVIV"] += 1

    # block-positional operators
    def scan_block(block: N.Block, params: set[str]) -> None:
        stmts = block.statements
        for i, s in enumerate(stmts):
            if isinstance(s, N.ExprStmt) and isinstance(s.expr, N.Call):
                counts["MFC"] += 1
            if isinstance(s, N.Assign) and s.op == "=" \
                    and not isinstance(s.value, N.Literal):
                counts["MVAE"] += 1
            if isinstance(s, N.Assign) and s.op == "=":
                counts["WVAE"] += _wvae_option_count(s.value)
            if i + 1 < len(stmts) and _naive_swappable(s, stmts[i + 1], checked):
                counts["WALR"] += 1
            for inner in _inner_blocks(s):
                scan_block(inner, params)

    def _inner_blocks(s):
        if isinstance(s, N.Block):
            yield s
        elif isinstance(s, N.If):
            yield s.then
            orelse = s.orelse
            while isinstance(orelse, N.If):
                yield orelse.then
                orelse = orelse.orelse
            if isinstance(orelse, N.Block):
                yield orelse
        elif isinstance(s, (N.For, N.While)):
            yield s.body

    for fn in c.functions:
        scan_block(fn.body, {p.name for p in fn.params})
        for node in N.walk(fn):
            if isinstance(node, N.For) and node.update is not None:
                counts["MLC"] += 1
                counts["WVAE"] += _wvae_option_count(node.update.value) \
                    if isinstance(node.update, N.Assign) and node.update.op == "=" else 0
                if isinstance(node.init, N.Assign) and node.init.op == "=":
                    counts["WVAE"] += _wvae_option_count(node.init.value)
    return counts


def _wvae_option_count(rhs) -> int:
    n = 0
    for x in _exprs_in(rhs):
        if isinstance(x, N.Binary) and x.op in ("+", "-", "*", "/", "%"):
            if x.op in ("+", "-", "*", "/"):
                n += 1
            if not (isinstance(x.left, N.Literal) and x.left.value == 1):
                n += 1
            if not (isinstance(x.right, N.Literal) and x.right.value == 1):
                n += 1
    return n


def _naive_swappable(a, b, checked: CheckedContract) -> bool:
    def footprint(s):
        if isinstance(s, N.LocalDecl):
            writes = {("local", s.name)}
            reads_src = [s.init] if s.init is not None else []
        elif isinstance(s, N.Assign):
            root = s.target
            reads_src = [s.value]
            while isinstance(root, N.Index):
                reads_src.append(root.index)
                root = root.base
            if not isinstance(root, N.Ident):
                return None
            kind, name = checked.bindings.get(root.node_id, (None, None))
            if kind is None:
                return None
            writes = {(kind, name)}
            if s.op != "=":
                reads_src.append(root)
        else:
            return None
        reads = set()
        for src in reads_src:
            for x in _exprs_in(src):
                if isinstance(x, N.Call) and x.name not in SAFE_CALLS:
                    return None
                if isinstance(x, N.Ident):
                    kind, name = checked.bindings.get(x.node_id, (None, None))
                    if kind is None:
                        return None
                    reads.add((kind, name))
                if isinstance(x, (N.MsgSender, N.MsgValue)):
                    reads.add(("msg", "msg"))
        return reads, writes

    fa, fb = footprint(a), footprint(b)
    if fa is None or fb is None:
        return False
    ra, wa = fa
    rb, wb = fb
    return not (wa & (rb | wb)) and not (wb & ra)
