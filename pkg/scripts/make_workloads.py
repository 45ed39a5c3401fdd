#!/usr/bin/env python3
"""Author the bundled workload sequences.

Each family sequence mixes black-box probing (unauthorized actors first,
full query sweeps, equivalence partitions and interval values around the
literals in the code) with white-box transition coverage for the stateful
contracts. Lengths are pinned per family so corpus statistics stay stable:
state_machine 252, wallet 19, escrow 183, storage 72, token 151.

Run from the repository root:  python scripts/make_workloads.py
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from solfault.lang import check, parse  # noqa: E402
from solfault.workload import load_sequence  # noqa: E402

TARGETS = {
    "state_machine": 252,
    "wallet": 19,
    "escrow": 183,
    "storage": 72,
    "token": 151,
}


def wallet() -> list[str]:
    return [
        "alice | getBalance |  | fresh account reads zero",
        "alice | deposit | value=100 | first deposit",
        "alice | getBalance |  | expect 100",
        "bob | withdraw | 150 | exceeds funds and holdings, must fail",
        "bob | deposit | value=500 |",
        "bob | getBalance |  | expect 500",
        "alice | withdraw | 0 | zero amount rejected",
        "alice | withdraw | 30 | partial withdrawal",
        "alice | getBalance |  | expect 70",
        "bob | withdraw | 500 | exact-balance drain",
        "bob | getBalance |  | expect 0",
        "carol | getBalance |  | untouched account",
        "attacker | withdraw | 1 | no funds, must fail",
        "alice | deposit | value=1 | boundary deposit",
        "alice | getBalance |  | expect 71",
        "alice | withdraw | 40 |",
        "attacker | withdraw | 25 | over-withdrawal, must fail",
        "alice | getBalance |  | expect 31",
        "owner | deposit | value=42 | funds stay with the contract",
    ]


def token() -> list[str]:
    calls = []
    # opening query sweep
    for who in ("owner", "alice", "bob"):
        calls.append(f"alice | balanceOf | {who} |")
    calls.append("alice | getTotalSupply |  |")
    # actors without funds go first
    calls.append("attacker | transfer | alice, 10 | no balance, must fail")
    calls.append("carol | transfer | bob, 1 | no balance, must fail")
    # fund the actor set
    calls.append("owner | transfer | alice, 1000 |")
    calls.append("owner | transfer | bob, 500 |")
    calls.append("owner | transfer | carol, 200 |")
    for who in ("owner", "alice", "bob", "carol"):
        calls.append(f"bob | balanceOf | {who} |")
    # interval probing around a holder balance (alice holds 1000)
    calls.append("alice | transfer | bob, 0 | zero amount is allowed")
    calls.append("alice | transfer | bob, 1 |")
    calls.append("alice | transfer | bob, 999 | exact remaining balance")
    calls.append("alice | transfer | bob, 1 | nothing left, must fail")
    calls.append("bob | transfer | alice, 750 | refill alice")
    calls.append("alice | balanceOf | alice |")
    calls.append("alice | balanceOf | bob |")
    # invalid recipient partition
    calls.append("owner | transfer | address(0), 10 | zero recipient, must fail")
    calls.append("owner | batchTransfer | [address(0)], [5] | zero recipient in batch, must fail")
    # batch shape partitions
    calls.append("owner | batchTransfer | [alice], [25] | singleton batch")
    calls.append("owner | batchTransfer | [alice, bob], [10, 20] |")
    calls.append("owner | batchTransfer | [alice, bob, carol], [1, 2, 3] |")
    calls.append("owner | batchTransfer | [alice], [1, 2] | length mismatch, must fail")
    calls.append("owner | batchTransfer | [], [] | empty batch, must fail")
    calls.append("attacker | batchTransfer | [alice, bob], [5, 5] | no balance, must fail")
    for who in ("owner", "alice", "bob", "carol"):
        calls.append(f"carol | balanceOf | {who} |")
    calls.append("carol | getTotalSupply |  |")
    # steady-state traffic: rotate small transfers and spot checks
    amounts = [2, 3, 5, 7, 11, 13]
    pairs = [("owner", "alice"), ("alice", "bob"), ("bob", "owner"),
             ("owner", "bob"), ("alice", "owner"), ("bob", "alice")]
    i = 0
    while len(calls) < 120:
        src, dst = pairs[i % len(pairs)]
        calls.append(f"{src} | transfer | {dst}, {amounts[i % len(amounts)]} |")
        if i % 4 == 3:
            calls.append(f"{src} | balanceOf | {dst} |")
        if i % 9 == 8:
            calls.append(f"owner | batchTransfer | [alice, bob], [{1 + i % 3}, 2] |")
        i += 1
    calls.append("owner | getTotalSupply |  | supply is invariant")
    # late silent-corruption window: carol is neither queried nor active below
    calls.append("attacker | transfer | carol, 50 | over-transfer, must fail")
    while len(calls) < TARGETS["token"] - 5:
        src, dst = pairs[i % len(pairs)]
        calls.append(f"{src} | transfer | {dst}, {amounts[i % len(amounts)]} |")
        if i % 5 == 4:
            calls.append(f"alice | balanceOf | {dst} |")
        i += 1
    calls.append("owner | batchTransfer | [alice, bob], [4, 4] |")
    calls.append("alice | balanceOf | owner |")
    calls.append("alice | balanceOf | alice |")
    calls.append("bob | balanceOf | bob |")
    calls.append("bob | getTotalSupply |  | closing supply check")
    return calls


def storage() -> list[str]:
    calls = [
        "alice | readSlot | 1 | empty slot reads zero",
        "alice | readSlot | 0 | boundary key",
        "alice | readSlot | 999 | boundary key",
        "alice | readSlot | 1000 | out of range, must fail",
        "attacker | adminRead | alice, 1 | not admin, must fail",
        "bob | adminClear | alice, 1 | not admin, must fail",
        "alice | store | 1, 42 | first write",
        "alice | readSlot | 1 | expect 42",
        "alice | store | 1, 43 | overwrite, slot count unchanged",
        "alice | readSlot | 1 | expect 43",
        "alice | store | 2, 7 |",
        "alice | store | 999, 1 | boundary key accepted",
        "alice | store | 1000, 5 | out of range for users, must fail",
        "owner | store | 1000, 5 | admin bypasses the key bound",
        "owner | adminRead | owner, 1000 | expect 5",
        "bob | store | 1, 11 | slots are per account",
        "bob | readSlot | 1 | expect 11",
        "alice | readSlot | 1 | still 43",
        "owner | adminRead | alice, 1 | admin sees alice",
        "owner | adminRead | bob, 1 | admin sees bob",
        "owner | adminClear | alice, 1 |",
        "alice | readSlot | 1 | cleared to zero",
        "owner | adminClear | alice, 2500 | beyond admin bound, must fail",
        "alice | store | 0, 1 | zero key",
        "alice | readSlot | 0 | expect 1",
        "carol | readSlot | 5 | untouched account",
        "attacker | store | 999, 999 | attacker may use own slots",
        "attacker | readSlot | 999 |",
        "owner | adminRead | attacker, 999 |",
        "owner | adminClear | attacker, 999 |",
        "attacker | readSlot | 999 | cleared",
    ]
    # steady-state per-actor traffic
    actors = ("alice", "bob", "carol")
    k = 0
    while len(calls) < TARGETS["storage"] - 4:
        who = actors[k % 3]
        key = 10 + (k % 7)
        calls.append(f"{who} | store | {key}, {100 + k} |")
        if k % 3 == 2:
            calls.append(f"{who} | readSlot | {key} |")
        k += 1
    calls.append("owner | adminRead | alice, 10 |")
    calls.append("owner | adminRead | bob, 11 |")
    calls.append("alice | readSlot | 2 | expect 7")
    calls.append("bob | readSlot | 12 |")
    return calls


def escrow() -> list[str]:
    calls = [
        "alice | currentState |  | starts active",
        "alice | depositsOf | alice |",
        "alice | depositsOf | bob |",
        "alice | depositsOf | carol |",
        "alice | deposit | value=10, alice | not the owner, must fail",
        "attacker | close |  | not the owner, must fail",
        "bob | enableRefunds |  | not the owner, must fail",
        "carol | withdraw | carol | refunds not enabled, must fail",
        "owner | beneficiaryWithdraw |  | not closed, must fail",
        "owner | deposit | value=100, alice |",
        "alice | depositsOf | alice | expect 100",
        "owner | deposit | value=250, bob |",
        "owner | deposit | value=50, alice | accumulates to 150",
        "owner | deposit | value=75, carol |",
        "owner | deposit | value=0, carol | zero deposit is a no-op",
        "bob | depositsOf | alice |",
        "bob | depositsOf | bob |",
        "bob | depositsOf | carol |",
        "bob | currentState |  |",
    ]
    # steady deposit traffic with spot checks
    payees = ("alice", "bob", "carol")
    k = 0
    while len(calls) < TARGETS["escrow"] - 24:
        payee = payees[k % 3]
        calls.append(f"owner | deposit | value={5 + k % 9}, {payee} |")
        if k % 4 == 3:
            calls.append(f"carol | depositsOf | {payee} |")
        if k % 11 == 10:
            calls.append("alice | currentState |  |")
        k += 1
    calls += [
        "attacker | deposit | value=5, attacker | not the owner, must fail",
        "owner | enableRefunds |  | switch to refunding",
        "owner | currentState |  | expect 1",
        "owner | deposit | value=5, alice | not active, must fail",
        "owner | close |  | not active, must fail",
        "owner | enableRefunds |  | not active, must fail",
        "carol | withdraw | alice | anyone may trigger a refund",
        "alice | depositsOf | alice | refunded to zero",
        "carol | withdraw | alice | second refund pays zero",
        "bob | withdraw | bob |",
        "bob | depositsOf | bob |",
        "carol | withdraw | carol |",
        "carol | depositsOf | carol |",
        "owner | beneficiaryWithdraw |  | not closed, must fail",
        "owner | withdraw | attacker | nothing deposited, pays zero",
        "attacker | depositsOf | attacker |",
        "alice | currentState |  |",
        "bob | depositsOf | alice |",
        "carol | depositsOf | bob |",
        "alice | depositsOf | carol |",
        "owner | depositsOf | owner |",
        "bob | currentState |  |",
        "carol | currentState |  |",
        "alice | depositsOf | alice | closing sweep",
    ]
    return calls


def state_machine() -> list[str]:
    calls = [
        "alice | currentState |  | starts created",
        "alice | isCompliant |  |",
        "alice | getReadingCount |  |",
        "attacker | assign | attacker, attacker | not the owner, must fail",
        "alice | startTransport |  | not the owner, must fail",
        "attacker | recordReading | 20, 50 | not the carrier, must fail",
        "carol | deliver |  | not the carrier, must fail",
        "bob | accept |  | not the receiver, must fail",
        "attacker | reject |  | not the receiver, must fail",
        "owner | startTransport |  | carrier unset, must fail",
        "bob | recordReading | 20, 50 | carrier not assigned yet, must fail",
        "owner | assign | bob, carol | carrier bob, receiver carol",
        "owner | startTransport |  | transport begins",
        "owner | startTransport |  | already started, must fail",
        "owner | assign | alice, alice | already started, must fail",
        "carol | accept |  | not delivered yet, must fail",
        "carol | reject |  | not delivered yet, must fail",
    ]
    # in-range readings: compliance must hold through this block
    in_range = [(0, 50), (10, 35), (-5, 0), (-4, 1), (29, 69), (30, 70),
                (15, 42), (1, 70), (30, 0), (-5, 70), (22, 55), (8, 33)]
    for t, h in in_range:
        calls.append(f"bob | recordReading | {t}, {h} |")
        if (t + h) % 5 == 0:
            calls.append("carol | isCompliant |  | still compliant")
    calls.append("alice | getReadingCount |  |")
    calls.append("alice | isCompliant |  | expect true")
    # steady in-range telemetry
    k = 0
    while len(calls) < TARGETS["state_machine"] - 40:
        t = -5 + (k * 3) % 36  # stays within [-5, 30]
        h = (k * 7) % 71       # stays within [0, 70]
        calls.append(f"bob | recordReading | {t}, {h} |")
        if k % 9 == 8:
            calls.append("carol | getReadingCount |  |")
        if k % 13 == 12:
            calls.append("alice | recordReading | 10, 10 | not the carrier, must fail")
        k += 1
    # boundary violations flip compliance
    calls += [
        "bob | recordReading | 31, 50 | temperature above the bound",
        "carol | isCompliant |  | expect false",
        "bob | recordReading | -6, 50 | temperature below the bound",
        "bob | recordReading | 20, 71 | humidity above the bound",
        "bob | recordReading | 1000, 1000 | far out of range",
        "bob | recordReading | -1000, 0 | far out of range",
        "bob | recordReading | 30, 70 | boundary values remain legal",
        "alice | isCompliant |  |",
        "alice | getReadingCount |  |",
    ]
    while len(calls) < TARGETS["state_machine"] - 12:
        t = 60 + (k % 5)
        calls.append(f"bob | recordReading | {t}, 10 | out-of-range reading")
        k += 1
    calls += [
        "bob | deliver |  | delivery",
        "bob | recordReading | 10, 10 | not in transit, must fail",
        "bob | deliver |  | already delivered, must fail",
        "carol | accept |  | non-compliant goods, must fail",
        "attacker | reject |  | not the receiver, must fail",
        "carol | reject |  | rejected",
        "carol | accept |  | already rejected, must fail",
        "carol | reject |  | already rejected, must fail",
        "owner | currentState |  | expect 4",
        "owner | isCompliant |  | expect false",
        "owner | getReadingCount |  |",
        "alice | currentState |  | closing check",
    ]
    return calls


BUILDERS = {
    "wallet": wallet,
    "token": token,
    "storage": storage,
    "escrow": escrow,
    "state_machine": state_machine,
}

HEADER = """\
# Curated workload for the {family} family.
# Format: caller | function | arg,arg,... | note
# A leading value=N argument attaches native currency to the call.
"""


def main() -> int:
    corpus = ROOT / "corpus"
    failures = 0
    for family, build in BUILDERS.items():
        calls = build()
        target = TARGETS[family]
        if len(calls) != target:
            print(f"{family}: built {len(calls)} calls, target {target}")
            failures += 1
            continue
        path = corpus / family / "workload.seq"
        body = HEADER.format(family=family) + "\n".join(calls) + "\n"
        path.write_text(body, encoding="utf-8")
        checked = check(parse((corpus / family / "base.sol").read_text()))
        seq = load_sequence(str(path), family, checked)
        assert len(seq) == target, (family, len(seq))
        print(f"{family}: wrote {target} calls")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
