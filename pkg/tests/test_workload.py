import pytest

from solfault.lang import check, parse, walk
from solfault.lang import nodes as N
from solfault.lang import types as T
from solfault.lang.values import ZERO_ADDRESS, Value, boolval
from solfault.workload import (
    DEFAULT_ACTORS, FormatError, InterfaceMismatch, Ungeneratable,
    augment_sequence, build_pool, literal_based, load_sequence, random_values,
    type_based,
)

from conftest import CORPUS


def test_type_based_int8():
    vals = type_based(T.sint(8))
    assert [v.v for v in vals] == [-128, 127, 0]


def test_type_based_uint_dedupes_zero_minimum():
    vals = type_based(T.uint(8))
    assert [v.v for v in vals] == [0, 255]


def test_type_based_bool_generates_both():
    assert [v.v for v in type_based(T.BOOL)] == [True, False]


def test_type_based_dynamic_array_includes_empty():
    vals = type_based(T.ArrayType(T.uint(64)))
    lengths = sorted(len(v.v) for v in vals)
    assert lengths == [0, 1, 2]


def test_type_based_strings_cover_lengths_zero_one_two():
    assert [len(v.v) for v in type_based(T.STRING)] == [0, 1, 2]


def test_type_based_addresses_cover_actors_plus_zero():
    vals = type_based(T.ADDRESS)
    names = [v.v for v in vals]
    assert names[:-1] == [a.name for a in DEFAULT_ACTORS]
    assert names[-1] == ZERO_ADDRESS


def test_type_based_mapping_rejected():
    with pytest.raises(Ungeneratable):
        type_based(T.MappingType(T.uint(64), T.uint(64)))


def _checked_fn(src: str):
    checked = check(parse(src))
    fn = next(f for f in checked.contract.functions if not f.is_constructor)
    return checked, fn


def test_literal_based_off_by_one():
    checked, fn = _checked_fn(
        "contract C { function f(uint64 a) public query returns (bool)"
        " { return a > 5; } }")
    vals = literal_based(fn, checked)
    assert {v.v for v in vals} == {4, 5, 6}


def test_literal_based_empty_without_literals():
    checked, fn = _checked_fn(
        "contract C { uint64 x; function f(uint64 a) public { x = a; } }")
    assert literal_based(fn, checked) == []


def test_literal_based_clamps_at_type_maximum():
    checked, fn = _checked_fn(
        "contract C { function f(uint8 a) public query returns (bool)"
        " { return a < 255; } }")
    vals = [v.v for v in literal_based(fn, checked)]
    assert vals == [254, 255]  # 256 is out of range and clamped away


def test_random_values_empty_and_deterministic():
    assert random_values(T.uint(64), 0, 1) == []
    a = random_values(T.uint(64), 20, 42)
    b = random_values(T.uint(64), 20, 42)
    assert a == b
    c = random_values(T.uint(64), 20, 43)
    assert a != c


def test_random_values_within_range():
    ty = T.sint(64)
    for v in random_values(ty, 1000, 7):
        assert ty.min_value <= v.v <= ty.max_value


def test_random_arrays_and_strings():
    arrays = random_values(T.ArrayType(T.uint(8)), 50, 3)
    assert any(len(a.v) == 0 for a in arrays)
    assert all(all(0 <= x.v <= 255 for x in a.v) for a in arrays)
    strings = random_values(T.STRING, 50, 3)
    assert len({s.v for s in strings}) > 1


def test_equivalence_partition_coverage():
    # for each parameter compared against a literal, the combined pool has
    # the literal itself and at least one value on each side
    checked, fn = _checked_fn(
        "contract C { function f(uint64 a) public query returns (bool)"
        " { return a > 100; } }")
    pool = build_pool(fn, checked, seed=1)
    combined = [v.v for v in pool.combined("a")]
    assert 100 in combined
    assert any(v < 100 for v in combined)
    assert any(v > 100 for v in combined)


def test_load_wallet_sequence_has_19_calls(wallet_family):
    assert len(wallet_family.workload) == 19


def test_load_state_machine_sequence_has_252_calls():
    from solfault.corpus import load_family
    fam = load_family(CORPUS, "state_machine")
    assert len(fam.workload) == 252


def test_sequence_rejects_unknown_function(tmp_path, wallet_family):
    seq = tmp_path / "bad.seq"
    seq.write_text("alice | missingFn |  |\n")
    with pytest.raises(InterfaceMismatch):
        load_sequence(str(seq), "wallet", wallet_family.checked["base"])


def test_sequence_rejects_bad_arity_and_types(tmp_path, wallet_family):
    checked = wallet_family.checked["base"]
    for line, exc in [
        ("alice | withdraw |  |", InterfaceMismatch),
        ("alice | withdraw | 1, 2 |", InterfaceMismatch),
        ("alice | withdraw | true |", FormatError),
        ("alice | getBalance | value=5 |", InterfaceMismatch),
        ("nosuch | withdraw | 1 |", FormatError),
        ("alice | withdraw | 99999999999999999999999999 |", FormatError),
        ("alice realmess", FormatError),
    ]:
        seq = tmp_path / "bad.seq"
        seq.write_text(line + "\n")
        with pytest.raises(exc):
            load_sequence(str(seq), "wallet", checked)


def test_sequence_value_prefix_and_comments(tmp_path, wallet_family):
    seq = tmp_path / "ok.seq"
    seq.write_text("# comment\n\nalice | deposit | value=10 | top up\n"
                   "alice | withdraw | 3 |\n")
    loaded = load_sequence(str(seq), "wallet", wallet_family.checked["base"])
    assert len(loaded) == 2
    assert loaded.calls[0].value == 10
    assert loaded.calls[0].note == "top up"
    assert loaded.calls[1].args == (Value(T.uint(64), 3),)


def test_sequence_array_and_address_literals(tmp_path):
    from solfault.corpus import load_family
    fam = load_family(CORPUS, "token")
    seq = tmp_path / "ok.seq"
    seq.write_text("owner | batchTransfer | [alice, address(0)], [1, 2] |\n")
    loaded = load_sequence(str(seq), "token", fam.checked["base"])
    to, amounts = loaded.calls[0].args
    assert [x.v for x in to.v] == ["alice", ZERO_ADDRESS]
    assert [x.v for x in amounts.v] == [1, 2]


def test_augment_appends_generated_tail(wallet_family):
    base = wallet_family.checked["base"]
    out = augment_sequence(wallet_family.workload, base, seed=5,
                           per_function_cap=3)
    assert len(out) > len(wallet_family.workload)
    assert out.calls[:len(wallet_family.workload)] == wallet_family.workload.calls
    tail = out.calls[len(wallet_family.workload):]
    assert all(c.note == "generated" for c in tail)
    # deterministic in the seed
    again = augment_sequence(wallet_family.workload, base, seed=5,
                             per_function_cap=3)
    assert again.calls == out.calls
    # generated calls type-check against the signature
    for call in tail:
        fn = base.functions[call.function]
        assert len(call.args) == len(fn.params)
        for arg, p in zip(call.args, fn.params):
            assert arg.type == p.type
