"""Property tests for the VM's ledger-safety invariants.

Random calls are drawn from the corpus contracts' own interfaces using the
typed value pools, so aborts of every kind (require, assert, builtin, gas)
show up naturally.
"""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from solfault.corpus import load_family
from solfault.lang import types as T
from solfault.lang.values import Value
from solfault.vm import LedgerState, TxCall, VmConfig, deploy, execute, query
from solfault.workload import DEFAULT_ACTORS, type_based

from conftest import CORPUS, FAMILIES

CONFIG = VmConfig()
ACTOR_NAMES = [a.name for a in DEFAULT_ACTORS]


def _candidates(ty: T.Type, rng: random.Random) -> Value:
    pool = type_based(ty)
    if isinstance(ty, T.IntType):
        pool = pool + [Value(ty, rng.randint(0, 1000))]
    return rng.choice(pool)


def random_call(checked, rng: random.Random) -> TxCall:
    fns = checked.public_functions()
    fn = rng.choice(fns)
    args = tuple(_candidates(p.type, rng) for p in fn.params)
    value = rng.choice((0, 0, 0, 1, 17, 250)) if fn.mutability != "query" else 0
    return TxCall(rng.choice(ACTOR_NAMES), fn.name, args, value=value)


def drive(family_name: str, seed: int, steps: int):
    """Yield (call, record, pre_ledger, post_ledger) for a random walk."""
    rng = random.Random(seed)
    family = load_family(CORPUS, family_name)
    checked = family.checked[rng.choice(("base", "stripped", "protected"))]
    ledger = LedgerState.genesis(
        [(a.name, a.initial_balance) for a in DEFAULT_ACTORS])
    ledger = deploy(checked, ledger, CONFIG)
    for _ in range(steps):
        call = random_call(checked, rng)
        fn = checked.functions[call.function]
        if fn.mutability == "query":
            rec = query(call, ledger, CONFIG)
            yield call, rec, ledger, ledger
        else:
            rec, new_ledger = execute(call, ledger, CONFIG)
            yield call, rec, ledger, new_ledger
            ledger = new_ledger


@given(st.sampled_from(FAMILIES), st.integers(0, 10_000))
@settings(max_examples=60)
def test_revert_safety(family_name, seed):
    for call, rec, pre, post in drive(family_name, seed, 8):
        if not rec.status.committed:
            assert rec.writes == ()
            assert post.dump() == pre.dump()


@given(st.sampled_from(FAMILIES), st.integers(0, 10_000))
@settings(max_examples=60)
def test_write_set_replay_reproduces_post_state(family_name, seed):
    for call, rec, pre, post in drive(family_name, seed, 8):
        if rec.status.committed and rec.writes:
            replayed = pre.apply_writes(dict(rec.writes))
            assert replayed.dump() == post.dump()


@given(st.sampled_from(FAMILIES), st.integers(0, 10_000))
@settings(max_examples=60)
def test_write_set_complete(family_name, seed):
    # every key whose value changed appears in the write set
    for call, rec, pre, post in drive(family_name, seed, 8):
        changed = {
            k for k in set(pre.entries) | set(post.entries)
            if pre.get(k) != post.get(k)
        }
        assert changed == {k for k, _ in rec.writes} or not rec.status.committed


@given(st.sampled_from(FAMILIES), st.integers(0, 10_000))
@settings(max_examples=40)
def test_read_set_completeness_under_perturbation(family_name, seed):
    # changing any key outside the read set cannot change the record
    rng = random.Random(seed ^ 0xABCDEF)
    for call, rec, pre, post in drive(family_name, seed, 4):
        read_keys = {k for k, _ in rec.reads}
        foreign = [k for k in pre.entries if k not in read_keys]
        perturbed = pre.copy()
        poison = Value(T.uint(64), 999_999_999)
        for key in foreign:
            value, version = perturbed.entries[key]
            perturbed.entries[key] = (poison if isinstance(value.type, T.IntType)
                                      else value, version + 7)
        fn = pre.contract.functions[call.function]
        if fn.mutability == "query":
            rec2 = query(call, perturbed, CONFIG)
        else:
            rec2, _ = execute(call, perturbed, CONFIG)
        assert rec2 == rec


@given(st.sampled_from(FAMILIES), st.integers(0, 10_000))
@settings(max_examples=40)
def test_determinism_repeated_runs(family_name, seed):
    first = [(c, r.status, r.steps, r.returns, r.writes)
             for c, r, _, _ in drive(family_name, seed, 6)]
    second = [(c, r.status, r.steps, r.returns, r.writes)
              for c, r, _, _ in drive(family_name, seed, 6)]
    assert first == second


@given(st.sampled_from(FAMILIES), st.integers(0, 10_000))
@settings(max_examples=60)
def test_native_conservation_and_non_negative(family_name, seed):
    total = None
    for call, rec, pre, post in drive(family_name, seed, 8):
        if total is None:
            total = pre.total_native()
        assert post.total_native() == total
        for key, (value, _) in post.entries.items():
            if key.startswith("__native__.balance["):
                assert value.v >= 0


@given(st.sampled_from(FAMILIES), st.integers(0, 10_000))
@settings(max_examples=40)
def test_step_accounting(family_name, seed):
    for call, rec, pre, post in drive(family_name, seed, 6):
        assert rec.steps >= 1
        assert rec.steps <= CONFIG.step_budget
        if rec.status.kind == "aborted_gas":
            assert rec.steps == CONFIG.step_budget


@pytest.mark.parametrize("family_name", FAMILIES)
def test_versions_never_decrease(family_name):
    prev: dict[str, int] = {}
    for call, rec, pre, post in drive(family_name, 7, 25):
        for key, (_, version) in post.entries.items():
            assert version >= prev.get(key, 0)
            prev[key] = version
