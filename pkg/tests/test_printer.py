from pathlib import Path

import pytest

from solfault.lang import parse, print_contract, structurally_equal
from solfault.lang import nodes as N

from conftest import CORPUS, FAMILIES

SNIPPETS = [
    "contract C { uint64 x; }",
    "contract C { uint64 public x = 5; int8 y = -3; bool b = true; }",
    "contract C { function f() public { } }",
    "contract C { function f(uint64 a, bool b) public query returns (uint64, bool)"
    " { return (a, b); } }",
    "contract C { function f(uint64 a) public returns (uint64) {"
    " if (a > 1) { return 1; } else if (a > 0) { return 2; } else { return 3; } } }",
    "contract C { uint64 x; function f(uint64 n) public {"
    " for (uint64 i = 0; i < n; i = i + 1) { x += i; } while (x > 10) { x -= 2; } } }",
    "contract C { function f(uint64 a) public returns (uint64) {"
    " return (a + 1) * 2 - a / 3 % 4; } }",
    "contract C { function f(uint64 a, uint64 b) public returns (bool) {"
    " return !(a > b) && (a == 1 || b != 2); } }",
    'contract C { function f() public { require(true, "m\\"sg"); revert("x"); } }',
    "contract C { mapping(address => uint64) m; function f() public {"
    " m[msg.sender] = m[address(0)] + msg.value; } }",
    "contract C { function f(uint64[] xs) public returns (uint64) {"
    " return xs[0] + xs.length; } }",
    "contract C { uint64 x; function f() public { x = safeAdd(x, 1);"
    " transfer(msg.sender, x); } }",
    "contract C { function f(int64 a) public returns (int64) { return -a * 2; } }",
    "contract C { function f(bool a, bool b, bool c) public returns (bool) {"
    " return (a == b) == c; } }",
]


@pytest.mark.parametrize("src", SNIPPETS)
def test_round_trip_structural_fixpoint(src):
    ast = parse(src)
    printed = print_contract(ast)
    assert structurally_equal(ast, parse(printed))
    # printing is idempotent on its own output
    assert print_contract(parse(printed)) == printed


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("variant", ("base", "stripped", "protected"))
def test_corpus_round_trip(family, variant):
    src = (CORPUS / family / f"{variant}.sol").read_text()
    ast = parse(src)
    printed = print_contract(ast)
    assert structurally_equal(ast, parse(printed))


def test_canonical_brace_style_for_if_without_else():
    ast = parse("contract C { function f(uint64 a) public {"
                " if (a > 0) { a = 0; } } }")
    printed = print_contract(ast)
    assert "if (a > 0) {" in printed
    assert "else" not in printed
    assert structurally_equal(ast, parse(printed))


def test_unary_and_precedence_parenthesization():
    ast = parse("contract C { function f(int64 a, int64 b) public returns (int64)"
                " { return -(a + b) * (a - -b); } }")
    printed = print_contract(ast)
    assert structurally_equal(ast, parse(printed))


def test_internal_visibility_prints_canonically():
    # explicit `internal` on state variables is the default and is omitted
    a = parse("contract C { uint64 internal x; }")
    b = parse(print_contract(a))
    assert structurally_equal(a, b)
    assert "internal" not in print_contract(a).split("\n")[1]
