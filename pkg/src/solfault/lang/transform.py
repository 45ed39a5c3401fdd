"""Whole-tree transformations on contracts."""

from __future__ import annotations

from . import nodes as N


def strip_requires(contract: N.Contract) -> N.Contract:
    """Return a copy with every require statement removed.

    All other nodes are preserved in order; NodeIds are reassigned densely.
    Idempotent by construction.
    """
    out = N.clone(contract)
    for fn in out.functions:
        _strip_block(fn.body)
    N.renumber(out)
    return out  # type: ignore[return-value]


def _strip_block(block: N.Block) -> None:
    block.statements = [s for s in block.statements if not isinstance(s, N.Require)]
    for s in block.statements:
        if isinstance(s, N.Block):
            _strip_block(s)
        elif isinstance(s, N.If):
            _strip_block(s.then)
            orelse = s.orelse
            while isinstance(orelse, N.If):
                _strip_block(orelse.then)
                orelse = orelse.orelse
            if isinstance(orelse, N.Block):
                _strip_block(orelse)
        elif isinstance(s, (N.For, N.While)):
            _strip_block(s.body)


def count_requires(contract: N.Contract) -> int:
    return sum(1 for n in N.walk(contract) if isinstance(n, N.Require))


def count_asserts(contract: N.Contract) -> int:
    return sum(1 for n in N.walk(contract) if isinstance(n, N.Assert))
