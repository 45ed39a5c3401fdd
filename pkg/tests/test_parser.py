import pytest

from solfault.lang import parse, ParseError, walk
from solfault.lang import nodes as N
from solfault.lang import types as T


def test_minimal_contract():
    ast = parse("contract C { uint64 x; function get() public query"
                " returns (uint64) { return x; } }")
    assert ast.name == "C"
    assert len(ast.state_vars) == 1
    assert len(ast.functions) == 1
    assert ast.functions[0].mutability == "query"


def test_overflowing_expression_parses():
    # overflow is a runtime (or verifier) concern, not a parse error
    ast = parse("contract C { function f() public { int8 v = 127 + 1; } }")
    decl = ast.functions[0].body.statements[0]
    assert isinstance(decl, N.LocalDecl)
    assert decl.type == T.IntType(8, signed=True)


def test_malformed_input_position():
    with pytest.raises(ParseError) as err:
        parse("contract C { function f( }")
    assert err.value.pos is not None
    assert err.value.pos.line == 1


def test_parse_error_carries_expected_tokens():
    with pytest.raises(ParseError) as err:
        parse("contract C { uint64 x }")
    assert err.value.expected


def test_node_ids_dense_preorder():
    ast = parse("contract C { uint64 x; function f(uint64 a) public"
                " { x = a + 1; } }")
    ids = [n.node_id for n in walk(ast)]
    assert ids == list(range(len(ids)))
    assert ast.node_id == 0


def test_node_ids_stable_across_parses():
    src = ("contract C { uint64 x; function f(uint64 a) public {"
           " if (a > 1) { x = a; } } }")
    a, b = parse(src), parse(src)
    ids_a = [(type(n).__name__, n.node_id) for n in walk(a)]
    ids_b = [(type(n).__name__, n.node_id) for n in walk(b)]
    assert ids_a == ids_b


def test_every_node_has_position():
    src = ("contract C { uint64 x = 3; function f(uint64 a) public"
           " returns (uint64) { for (uint64 i = 0; i < a; i = i + 1)"
           " { x += i; } return x; } }")
    assert all(n.pos is not None for n in walk(parse(src)))


def test_default_int_width_is_configurable():
    ast = parse("contract C { uint x; int y; }", default_int_width=128)
    assert ast.state_vars[0].type == T.IntType(128, signed=False)
    assert ast.state_vars[1].type == T.IntType(128, signed=True)


def test_bad_width_rejected():
    with pytest.raises(ParseError):
        parse("contract C { uint7 x; }")


def test_mapping_and_array_types():
    ast = parse("contract C { mapping(address => mapping(uint64 => uint64)) m;"
                " uint64[] xs; }")
    m = ast.state_vars[0].type
    assert isinstance(m, T.MappingType)
    assert isinstance(m.value, T.MappingType)
    assert ast.state_vars[1].type == T.ArrayType(T.uint(64))


def test_address_zero_vs_address_declaration():
    ast = parse("contract C { function f(address a) public returns (bool)"
                " { address b = a; return b == address(0); } }")
    body = ast.functions[0].body.statements
    assert isinstance(body[0], N.LocalDecl)
    ret = body[1]
    assert isinstance(ret.values[0], N.Binary)
    assert isinstance(ret.values[0].right, N.ZeroAddress)


def test_else_if_chain():
    ast = parse("contract C { function f(uint64 a) public returns (uint64) {"
                " if (a > 2) { return 2; } else if (a > 1) { return 1; }"
                " else { return 0; } } }")
    top = ast.functions[0].body.statements[0]
    assert isinstance(top.orelse, N.If)
    assert isinstance(top.orelse.orelse, N.Block)


def test_multi_return_and_tuple():
    ast = parse("contract C { function f() public query returns (uint64, bool)"
                " { return (1, true); } }")
    ret = ast.functions[0].body.statements[0]
    assert len(ret.values) == 2


def test_comments_and_strings():
    ast = parse('contract C { // line\n /* block\n comment */ string s = "a\\"b";'
                ' }')
    assert ast.state_vars[0].init.value == 'a"b'


def test_chained_comparison_rejected():
    with pytest.raises(ParseError):
        parse("contract C { function f(uint64 a) public { bool b = 1 < a < 3; } }")
