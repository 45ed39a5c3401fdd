from solfault.lang import (
    check, count_requires, parse, print_contract, strip_requires,
    structurally_equal,
)

from conftest import CORPUS, FAMILIES


def test_strip_removes_all_requires_and_nothing_else():
    src = ("contract C { uint64 x; function f(uint64 a) public {"
           " require(a > 0, \"m\"); x = a; require(x > 1);"
           " if (x > 2) { require(x < 10); x = 3; } } }")
    ast = parse(src)
    stripped = strip_requires(ast)
    assert count_requires(stripped) == 0
    assert count_requires(ast) == 3  # input untouched
    fn = stripped.functions[0]
    kinds = [type(s).__name__ for s in fn.body.statements]
    assert kinds == ["Assign", "If"]


def test_strip_identity_when_no_requires():
    ast = parse("contract C { uint64 x; function f() public { x = 1; } }")
    assert structurally_equal(ast, strip_requires(ast))


def test_strip_is_idempotent():
    for family in FAMILIES:
        ast = parse((CORPUS / family / "base.sol").read_text())
        once = strip_requires(ast)
        twice = strip_requires(once)
        assert structurally_equal(once, twice)


def test_wallet_base_has_two_requires_and_matches_golden_stripped():
    base = parse((CORPUS / "wallet" / "base.sol").read_text())
    assert count_requires(base) == 2
    golden = (CORPUS / "wallet" / "stripped.sol").read_text()
    assert print_contract(strip_requires(base)) == golden


def test_all_bundled_stripped_files_are_strip_of_base():
    for family in FAMILIES:
        base = parse((CORPUS / family / "base.sol").read_text())
        golden = (CORPUS / family / "stripped.sol").read_text()
        derived = print_contract(strip_requires(base))
        assert derived == golden, family
        check(parse(golden))  # stripped variants stay well typed


def test_node_ids_reassigned_densely():
    from solfault.lang import walk
    ast = parse((CORPUS / "wallet" / "base.sol").read_text())
    stripped = strip_requires(ast)
    ids = [n.node_id for n in walk(stripped)]
    assert ids == list(range(len(ids)))
