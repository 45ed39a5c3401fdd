import json
from collections import Counter
from pathlib import Path

import pytest

from solfault.catalog import catalog
from solfault.lang import check, parse, structurally_equal
from solfault.mutate import (
    enumerate_sites, generate, generate_variant, load_inventory,
    write_mutant_tree,
)

from conftest import CORPUS, FAMILIES
from diff_oracle import is_single_operator_edit, tree_diff
from site_walker import count_sites

GOLDEN = json.loads((Path(__file__).parent / "golden" / "mutant_counts.json")
                    .read_text())


def test_empty_contract_yields_no_sites(full_manifest):
    checked = check(parse("contract C { }"))
    assert enumerate_sites(checked, full_manifest) == []


def test_only_mfc_counts_call_statements():
    checked = check(parse(
        "contract C { uint64 x; function g() internal { x = x + 1; }"
        " function f() public { g(); g(); g(); } }"))
    manifest = catalog(only=("MFC",))
    sites = enumerate_sites(checked, manifest)
    assert len(sites) == 3
    assert all(code == "MFC" for code, _, _ in sites)


def test_sites_ordered_by_opcode_then_preorder(families, full_manifest):
    for fam in families:
        sites = enumerate_sites(fam.checked["base"], full_manifest)
        assert sites == sorted(sites, key=lambda s: (s[0], s[1]))


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("variant", ("base", "stripped", "protected"))
def test_site_counts_match_independent_walker(family, variant, full_manifest):
    src = (CORPUS / family / f"{variant}.sol").read_text()
    checked = check(parse(src))
    expected = count_sites(checked)
    sites = enumerate_sites(checked, full_manifest)
    got = Counter()
    for code, _site, n_alts in sites:
        got[code] += n_alts
    for code, n in expected.items():
        assert got.get(code, 0) == n, (family, variant, code)


def test_full_corpus_counts_match_golden(families, full_manifest):
    for fam in families:
        sets = generate(fam, full_manifest)
        for variant, mset in sets.items():
            want = GOLDEN[fam.name][variant]
            assert len(mset.mutants) == want["total"], (fam.name, variant)
            assert len(mset.skipped) == want["skipped"]
            ops = Counter(m.operator for m in mset.mutants)
            assert dict(sorted(ops.items())) == want["by_operator"]


def test_mutant_labels_unique_and_canonical(families, full_manifest):
    seen = set()
    for fam in families:
        for variant, mset in generate(fam, full_manifest).items():
            for m in mset.mutants:
                assert m.label == f"{m.family}_{m.variant}_{m.operator}_{m.site}_{m.alt}"
                assert m.label not in seen
                seen.add(m.label)


def test_every_mutant_source_parses_checks_and_roundtrips(families, full_manifest):
    for fam in families:
        for variant, mset in generate(fam, full_manifest).items():
            for m in mset.mutants:
                reparsed = parse(m.source)
                check(reparsed)
                assert structurally_equal(reparsed, m.ast)


def test_single_fault_audit_with_independent_oracle(families, full_manifest):
    # 100% of generated mutants differ from their reference by exactly one
    # operator-shaped edit, per the independent tree differ
    for fam in families:
        for variant, mset in generate(fam, full_manifest).items():
            reference = fam.checked[variant].contract
            for m in mset.mutants:
                assert is_single_operator_edit(reference, parse(m.source)), m.label


def test_single_edit_kinds_are_operator_shaped(wallet_family, full_manifest):
    kinds = set()
    mset = generate_variant("wallet", "base", wallet_family.checked["base"],
                            full_manifest)
    for m in mset.mutants:
        edits = tree_diff(wallet_family.checked["base"].contract, parse(m.source))
        assert len(edits) == 1
        kinds.add(edits[0].kind)
    assert kinds <= {"replace", "splice", "swap", "attr", "drop_opt", "add_opt"}


def test_stripped_variants_lack_require_operators(families, full_manifest):
    require_ops = {"MRTS", "MRIV", "MROTS", "MROIV", "MRATS", "MRAIV",
                   "WRTS", "WRIV", "WLEP"}
    for fam in families:
        stripped = generate_variant(fam.name, "stripped",
                                    fam.checked["stripped"], full_manifest)
        ops = {m.operator for m in stripped.mutants}
        assert not (ops & require_ops), fam.name
        base_ops = {m.operator for m in generate_variant(
            fam.name, "base", fam.checked["base"], full_manifest).mutants}
        assert ops <= base_ops  # strictly fewer fault types than base


def test_regeneration_is_byte_identical(wallet_family, full_manifest, tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    for out in (a, b):
        sets = generate(wallet_family, full_manifest)
        write_mutant_tree(out, wallet_family, sets, full_manifest)
    files_a = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    files_b = sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
    assert files_a == files_b
    for rel in files_a:
        assert (a / rel).read_bytes() == (b / rel).read_bytes(), rel


def test_mutant_tree_layout_and_inventory(wallet_family, full_manifest, tmp_path):
    sets = generate(wallet_family, full_manifest)
    inventory = write_mutant_tree(tmp_path, wallet_family, sets, full_manifest)
    assert (tmp_path / "wallet" / "manifest.json").exists()
    loaded = load_inventory(tmp_path, "wallet")
    assert loaded == inventory
    for variant, mset in sets.items():
        for m in mset.mutants:
            sol = tmp_path / "wallet" / variant / f"{m.label}.sol"
            assert sol.exists()
            assert sol.read_text() == m.source
        entries = loaded["variants"][variant]["mutants"]
        assert [e["label"] for e in entries] == [m.label for m in mset.mutants]
        assert all({"operator", "origin", "odc_type", "qualifier", "site",
                    "alt"} <= set(e) for e in entries)


def test_mutant_count_equals_site_alternatives_minus_skipped(families, full_manifest):
    for fam in families:
        for variant in ("base", "stripped", "protected"):
            checked = fam.checked[variant]
            sites = enumerate_sites(checked, full_manifest)
            total_alts = sum(n for _, _, n in sites)
            mset = generate_variant(fam.name, variant, checked, full_manifest)
            assert len(mset.mutants) + len(mset.skipped) == total_alts


def test_illegal_mutants_land_in_skipped_report():
    # unwrapping this if hoists `t` into the outer block where a second `t`
    # is declared later, so the mutant fails the type check and the site is
    # skipped with a reason instead of aborting the run
    checked = check(parse(
        "contract C { uint64 x; function f(uint64 a) public {"
        " if (a > 0) { uint64 t = 1; x = t; }"
        " uint64 t = 2; x = t; } }"))
    manifest = catalog(only=("MIA",))
    mset = generate_variant("c", "base", checked, manifest)
    assert mset.mutants == []
    assert len(mset.skipped) == 1
    skip = mset.skipped[0]
    assert skip.operator == "MIA"
    assert "declared" in skip.reason
