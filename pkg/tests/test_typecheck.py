import pytest

from solfault.lang import parse, check, TypeCheckError


def check_src(body: str):
    return check(parse(body))


def test_annotations_and_bindings():
    checked = check_src(
        "contract C { uint64 x; function f(uint64 a) public returns (uint64)"
        " { uint64 b = a + x; return b; } }")
    fn = checked.functions["f"]
    assert checked.enclosing_fn(fn.body.statements[0]) is fn
    assert checked.state_vars["x"].name == "x"


@pytest.mark.parametrize("src, fragment", [
    ("contract C { function f() public { y = 1; } }", "unknown"),
    ("contract C { uint64 x; function f() public { x = true; } }", "assign"),
    ("contract C { function f() public { if (1) { } } }", "bool"),
    ("contract C { uint64 x; function f() public query { x = 1; } }", "query"),
    ("contract C { function f() public query { transfer(msg.sender, 1); } }", "query"),
    ("contract C { function f() public query returns (uint64) { return msg.value; } }", "query"),
    ("contract C { constructor() { } constructor() { } }", "constructor"),
    ("contract C { function f(mapping(uint64 => uint64) m) public { } }", "mapping"),
    ("contract C { function f() public { mapping(uint64 => uint64) m; } }", "mapping"),
    ("contract C { uint64 x; uint64 x; }", "duplicate"),
    ("contract C { function f(uint64 a) public { uint64 a = 1; } }", "declared"),
    ("contract C { function f() public returns (uint64) { return (1, 2); } }", "arity"),
    ("contract C { function f() public { uint8 v = 300; } }", "range"),
    ("contract C { function f() public { uint64 v = 1 + true; } }", "operand"),
    ("contract C { function f(uint32 a, uint64 b) public { uint64 c = a + b; } }", "operand"),
    ("contract C { function f() public { g(); } }", "unknown function"),
    ("contract C { function f() public { f(); } }", "recursive"),
    ("contract C { function f() public { g(); } function g() public { f(); } }", "recursive"),
    ("contract C { function q() public query { t(); } function t() public { } }", "query"),
    ("contract C { function f() public { 1 + 1; } }", "call"),
    ("contract C { function f() public { uint64 v = safeAdd(1, 2, 3); } }", "two arguments"),
    ("contract C { function safeAdd() public { } }", "builtin"),
    ("contract C { uint64 x = msg.value; }", "constant"),
    ("contract C { function f(uint64[] a) public { uint64 v = a[true]; } }", "unsigned"),
    ("contract C { function f(int64 i) public { int64 v = -i * -true; } }", "signed"),
])
def test_checker_rejections(src, fragment):
    with pytest.raises(TypeCheckError) as err:
        check_src(src)
    assert fragment.split()[0] in str(err.value).lower()


def test_query_purity_is_statically_enforced():
    with pytest.raises(TypeCheckError):
        check_src("contract C { uint64 x; function g() public query"
                  " returns (uint64) { x = 2; return x; } }")


def test_literal_adopts_context_type():
    checked = check_src(
        "contract C { function f(int8 v) public returns (bool) { return v > 5; } }")
    fn = checked.functions["f"]
    cmp = fn.body.statements[0].values[0]
    assert checked.type_of(cmp.right).render() == "int8"


def test_negative_literal_fits_signed_minimum():
    checked = check_src("contract C { function f() public { int8 v = -128; } }")
    assert checked is not None
    with pytest.raises(TypeCheckError):
        check_src("contract C { function f() public { int8 v = -129; } }")


def test_transfer_shadowing():
    # a contract-defined transfer function hides the native builtin
    checked = check_src(
        "contract C { uint64 n; function transfer(address to, uint64 v) public"
        " { n = v; } function f() public { transfer(msg.sender, 3); } }")
    assert "transfer" in checked.functions
    # without a user definition the builtin applies and returns nothing
    with pytest.raises(TypeCheckError):
        check_src("contract C { function f() public"
                  " { uint64 v = transfer(msg.sender, 3); } }")


def test_internal_calls_allowed_from_transactions():
    checked = check_src(
        "contract C { uint64 x;"
        " function bump() internal { x = x + 1; }"
        " function f() public { bump(); } }")
    assert checked.functions["bump"].visibility == "internal"
