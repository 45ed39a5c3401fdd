#!/usr/bin/env python3
"""Derive stripped contract variants and sanity-check the corpus.

Stripped variants are print(strip(parse(base))) by construction. The check
pass parses and type-checks all variants, verifies the family invariant
(identical public names and parameter signatures across variants), and runs
every variant's reference trace, reporting abort counts: aborts in reference
runs are workload steps intended to fail, and a protected reference must
never trip one of its own asserts.

Run from the repository root:  python scripts/build_corpus.py
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from solfault.lang import check, count_requires, parse, print_contract, strip_requires  # noqa: E402
from solfault.workload import DEFAULT_ACTORS, load_sequence  # noqa: E402
from solfault.vm import LedgerState, VmConfig, deploy, execute, query  # noqa: E402

FAMILIES = ("state_machine", "wallet", "escrow", "storage", "token")


def main() -> int:
    corpus = ROOT / "corpus"
    config = VmConfig()
    bad = 0
    for family in FAMILIES:
        fam_dir = corpus / family
        base = parse((fam_dir / "base.sol").read_text())
        stripped = strip_requires(base)
        (fam_dir / "stripped.sol").write_text(print_contract(stripped))
        protected = parse((fam_dir / "protected.sol").read_text())

        variants = {"base": base, "stripped": stripped, "protected": protected}
        checked = {name: check(ast) for name, ast in variants.items()}

        # the family invariant: identical public names and parameter types
        def signature(ck):
            return sorted(
                (f.name, tuple(p.type.render() for p in f.params), f.mutability)
                for f in ck.public_functions()
            )
        sig = signature(checked["base"])
        for name in ("stripped", "protected"):
            if signature(checked[name]) != sig:
                print(f"{family}/{name}: public interface differs from base")
                bad += 1

        seq = load_sequence(str(fam_dir / "workload.seq"), family, checked["base"])
        for name, ck in checked.items():
            ledger = LedgerState.genesis(
                [(a.name, a.initial_balance) for a in DEFAULT_ACTORS])
            ledger = deploy(ck, ledger, config)
            aborts: dict[str, int] = {}
            assert_aborts = 0
            for call in seq.calls:
                fn = ck.functions[call.function]
                if fn.mutability == "query":
                    rec = query(call, ledger, config)
                else:
                    rec, ledger = execute(call, ledger, config)
                if not rec.status.committed:
                    aborts[rec.status.kind] = aborts.get(rec.status.kind, 0) + 1
                    if rec.status.kind == "aborted_assert":
                        assert_aborts += 1
            summary = ", ".join(f"{k}={v}" for k, v in sorted(aborts.items())) or "none"
            print(f"{family}/{name}: requires={count_requires(variants[name])} "
                  f"calls={len(seq)} aborts: {summary}")
            if assert_aborts:
                print(f"  ERROR: {assert_aborts} assert aborts in a reference run")
                bad += 1
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
