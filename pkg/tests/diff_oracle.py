"""Independent tree-diff oracle.

Compares two contract ASTs structurally and reports every edit region. It
shares only the parser with the engine: shapes, equality, list alignment
and edit classification are reimplemented here from scratch so the
single-fault audit does not trust the mutation engine's own bookkeeping.

Operator-shaped edit kinds:
  replace      one subtree replaced by another
  splice       k statements replaced by m statements in one list position
               (covers deletion k=1,m=0 and if-unwrapping k=1,m>=1)
  swap         two adjacent list entries exchanged
  attr         one scalar attribute changed (visibility, operator symbol)
  drop_opt     an optional child removed (initializer, loop update)
  add_opt      an optional child added
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from solfault.lang import nodes as N


@dataclass(frozen=True)
class Edit:
    kind: str
    path: tuple
    detail: str = ""


def _shape(node):
    """Structural value of a node: class name plus field shapes, no ids."""
    if not isinstance(node, N.Node):
        if hasattr(node, "render") and not isinstance(node, (str, int, bool)):
            return node.render()
        return node
    parts = [type(node).__name__]
    for f in fields(node):
        v = getattr(node, f.name)
        if isinstance(v, list):
            parts.append(tuple(_shape(x) for x in v))
        else:
            parts.append(_shape(v))
    return tuple(parts)


def _equal(a, b) -> bool:
    return _shape(a) == _shape(b)


def _diff_lists(a: list, b: list, path: tuple, out: list[Edit]) -> None:
    lo = 0
    while lo < len(a) and lo < len(b) and _equal(a[lo], b[lo]):
        lo += 1
    hi = 0
    while (hi < len(a) - lo and hi < len(b) - lo
           and _equal(a[len(a) - 1 - hi], b[len(b) - 1 - hi])):
        hi += 1
    mid_a = a[lo:len(a) - hi]
    mid_b = b[lo:len(b) - hi]
    if not mid_a and not mid_b:
        return
    if len(mid_a) == 1 and len(mid_b) == 1:
        _diff(mid_a[0], mid_b[0], path + (lo,), out)
        return
    if (len(mid_a) == 2 and len(mid_b) == 2
            and _equal(mid_a[0], mid_b[1]) and _equal(mid_a[1], mid_b[0])):
        out.append(Edit("swap", path + (lo,)))
        return
    out.append(Edit("splice", path + (lo,),
                    detail=f"{len(mid_a)}->{len(mid_b)}"))


def _diff(a, b, path: tuple, out: list[Edit]) -> None:
    a_is_node = isinstance(a, N.Node)
    b_is_node = isinstance(b, N.Node)
    if a_is_node != b_is_node or (a_is_node and type(a) is not type(b)):
        if a is None and b is not None:
            out.append(Edit("add_opt", path))
        elif b is None and a is not None:
            out.append(Edit("drop_opt", path))
        else:
            out.append(Edit("replace", path))
        return
    if not a_is_node:
        if a != b and _shape(a) != _shape(b):
            out.append(Edit("attr", path, detail=f"{a!r}->{b!r}"))
        return
    for f in fields(a):
        va = getattr(a, f.name)
        vb = getattr(b, f.name)
        sub = path + (f.name,)
        if isinstance(va, list) or isinstance(vb, list):
            _diff_lists(va, vb, sub, out)
        elif isinstance(va, N.Node) or isinstance(vb, N.Node) \
                or va is None or vb is None:
            if va is None and vb is None:
                continue
            if _equal(va, vb):
                continue
            _diff(va, vb, sub, out)
        else:
            if va != vb and _shape(va) != _shape(vb):
                out.append(Edit("attr", sub, detail=f"{va!r}->{vb!r}"))


def tree_diff(reference: N.Contract, mutant: N.Contract) -> list[Edit]:
    out: list[Edit] = []
    _diff(reference, mutant, (), out)
    return out


def is_single_operator_edit(reference: N.Contract, mutant: N.Contract) -> bool:
    edits = tree_diff(reference, mutant)
    if len(edits) != 1:
        return False
    return edits[0].kind in ("replace", "splice", "swap", "attr",
                             "drop_opt", "add_opt")
