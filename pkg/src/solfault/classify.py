"""Outcome classification: error/failure model, detection funnel, recall.

The per-mutant OutcomeVector is existential over the paired trace. Index
pairing rules: an index where both runs aborted (any kinds) is a match,
mirroring workload steps that are meant to fail; a mutant abort against a
committed reference is an abort (or gas/timeout) failure; result equality
compares return values for queries and (status, returns) for transactions.
A mutant that concludes a transaction the reference rejected produces a
client-visible wrong result, so it counts as a reliability failure, plus
an integrity failure when its ledger writes diverge too.

The funnel assigns every mutant the earliest stage that detects it:
formal verification (when verdicts are supplied), contract self-check
(require/assert/revert aborts), runtime platform check (builtin, gas and
timeout aborts), output invariant check (client-visible result divergence),
and a residual split into latent integrity errors and ineffective mutants.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

from .harness import PairedDiff
from .verifier import UNSAFE, VerifierVerdict

SELF_CHECK_KINDS = ("aborted_require", "aborted_assert", "aborted_revert")
PLATFORM_KINDS = ("aborted_builtin", "aborted_gas", "aborted_timeout")

STAGES = (
    "formal_verification",
    "contract_self_check",
    "runtime_platform_check",
    "output_invariant_check",
    "none",
)


@dataclass(frozen=True)
class OutcomeVector:
    abort_failure: bool = False
    gas_or_timeout: bool = False
    reliability_failure: bool = False
    integrity_failure: bool = False
    latent_integrity_error: bool = False

    @property
    def ineffective(self) -> bool:
        return not (self.abort_failure or self.gas_or_timeout
                    or self.reliability_failure or self.integrity_failure
                    or self.latent_integrity_error)

    def to_json(self) -> dict:
        return {
            "abort_failure": self.abort_failure,
            "gas_or_timeout": self.gas_or_timeout,
            "reliability_failure": self.reliability_failure,
            "integrity_failure": self.integrity_failure,
            "latent_integrity_error": self.latent_integrity_error,
            "ineffective": self.ineffective,
        }


@dataclass(frozen=True)
class AbortEvidence:
    """Which check kinds produced mutant-only aborts, for funnel staging."""

    self_check: bool = False
    platform: bool = False


class MissingInput(Exception):
    def __init__(self, labels: list[str]):
        self.labels = labels
        super().__init__(f"missing inputs for: {', '.join(labels)}")


def _result_equal(row) -> bool:
    if row.is_query:
        return row.reference.returns == row.mutant.returns
    return (row.reference.status == row.mutant.status
            and row.reference.returns == row.mutant.returns)


def classify(diff: PairedDiff) -> OutcomeVector:
    """OutcomeVector for one mutant's paired trace (total, pure)."""
    abort = gas = reliability = integrity = latent = False
    dep = diff.mutant_deploy_failure
    if dep is not None:
        if dep.kind in ("aborted_gas", "aborted_timeout"):
            gas = True
        else:
            abort = True
        return OutcomeVector(abort, gas, reliability, integrity, latent)
    for row in diff.rows:
        ref, mut = row.reference, row.mutant
        if not ref.status.committed and not mut.status.committed:
            continue  # matching intended failure
        if ref.status.committed and not mut.status.committed:
            if mut.status.gas_or_timeout:
                gas = True
            else:
                abort = True
            continue
        if not ref.status.committed and mut.status.committed:
            reliability = True
            if row.rw_divergence:
                integrity = True
            continue
        # both committed
        returns_differ = ref.returns != mut.returns
        rw_differ = row.rw_divergence
        if returns_differ:
            reliability = True
            if rw_differ:
                integrity = True
        elif rw_differ:
            latent = True
    return OutcomeVector(abort, gas, reliability, integrity, latent)


def abort_evidence(diff: PairedDiff) -> AbortEvidence:
    dep = diff.mutant_deploy_failure
    if dep is not None:
        return AbortEvidence(self_check=dep.kind in SELF_CHECK_KINDS,
                             platform=dep.kind in PLATFORM_KINDS)
    self_check = platform = False
    for row in diff.rows:
        if row.reference.status.committed and not row.mutant.status.committed:
            kind = row.mutant.status.kind
            self_check = self_check or kind in SELF_CHECK_KINDS
            platform = platform or kind in PLATFORM_KINDS
    return AbortEvidence(self_check, platform)


@dataclass(frozen=True)
class FunnelRecord:
    label: str
    stage: str  # one of STAGES
    residual: str | None = None  # latent_integrity_error | ineffective

    def to_json(self) -> dict:
        out: dict = {"label": self.label, "stage": self.stage}
        if self.residual is not None:
            out["residual"] = self.residual
        return out


def funnel(vectors: dict[str, OutcomeVector],
           evidence: dict[str, AbortEvidence],
           verdicts: dict[str, VerifierVerdict] | None = None,
           ) -> tuple[dict[str, FunnelRecord], dict[str, int]]:
    """Assign each mutant its earliest detection stage; returns the records
    and the per-stage counts (which sum to the mutant count)."""
    missing = sorted(set(vectors) - set(evidence))
    if missing:
        raise MissingInput(missing)
    records: dict[str, FunnelRecord] = {}
    stages = STAGES if verdicts is not None else STAGES[1:]
    counts = {stage: 0 for stage in stages}
    counts["residual_latent"] = 0
    counts["residual_ineffective"] = 0
    for label in sorted(vectors):
        vec = vectors[label]
        ev = evidence[label]
        if verdicts is not None and label in verdicts \
                and verdicts[label].verdict == UNSAFE:
            rec = FunnelRecord(label, "formal_verification")
        elif ev.self_check:
            rec = FunnelRecord(label, "contract_self_check")
        elif ev.platform:
            rec = FunnelRecord(label, "runtime_platform_check")
        elif vec.reliability_failure or vec.integrity_failure:
            rec = FunnelRecord(label, "output_invariant_check")
        else:
            residual = ("latent_integrity_error"
                        if vec.latent_integrity_error else "ineffective")
            rec = FunnelRecord(label, "none", residual)
            counts[f"residual_{'latent' if vec.latent_integrity_error else 'ineffective'}"] += 1
        records[label] = rec
        counts[rec.stage] += 1
    return records, counts


# ── recall ───────────────────────────────────────────────────────────────

CATEGORIES = (
    ("abort_failures", lambda v: v.abort_failure),
    ("gas_or_timeout", lambda v: v.gas_or_timeout),
    ("reliability_failures", lambda v: v.reliability_failure),
    ("integrity_failures", lambda v: v.integrity_failure),
    ("latent_integrity_errors", lambda v: v.latent_integrity_error),
    ("ineffective", lambda v: v.ineffective),
    ("all_effective", lambda v: not v.ineffective),
)


@dataclass
class RecallRow:
    category: str
    true_positives: int
    false_negatives: int

    @property
    def recall(self) -> float | None:
        total = self.true_positives + self.false_negatives
        return self.true_positives / total if total else None

    def render_recall(self) -> str:
        r = self.recall
        return "n/a" if r is None else f"{100 * r:.1f}%"


class EmptyCategory(Exception):
    pass


def recall(vectors: dict[str, OutcomeVector],
           confusion_labels: dict[str, str]) -> list[RecallRow]:
    """Verification recall per effect category: TP / (TP + FN) among the
    mutants in the category that have usable confusion labels."""
    rows = []
    for name, member in CATEGORIES:
        tp = fn = 0
        for label, vec in vectors.items():
            if not member(vec) or label not in confusion_labels:
                continue
            if confusion_labels[label] == "true_positive":
                tp += 1
            elif confusion_labels[label] == "false_negative":
                fn += 1
        rows.append(RecallRow(name, tp, fn))
    return rows


# ── exports ──────────────────────────────────────────────────────────────


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def export_outcomes_csv(path: str | Path,
                        vectors: dict[str, OutcomeVector]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "abort_failure", "gas_or_timeout",
                "reliability_failure", "integrity_failure",
                "latent_integrity_error", "ineffective"])
    for label in sorted(vectors):
        v = vectors[label]
        w.writerow([label, v.abort_failure, v.gas_or_timeout,
                    v.reliability_failure, v.integrity_failure,
                    v.latent_integrity_error, v.ineffective])
    _write(Path(path), buf.getvalue())


def export_funnel(json_path: str | Path, csv_path: str | Path,
                  records: dict[str, FunnelRecord],
                  counts: dict[str, int]) -> None:
    obj = {
        "stage_counts": counts,
        "mutants": [records[label].to_json() for label in sorted(records)],
    }
    _write(Path(json_path), json.dumps(obj, indent=2, sort_keys=True) + "\n")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "stage", "residual"])
    for label in sorted(records):
        rec = records[label]
        w.writerow([label, rec.stage, rec.residual or ""])
    _write(Path(csv_path), buf.getvalue())


def export_recall_csv(path: str | Path, rows: list[RecallRow]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["category", "true_positives", "false_negatives", "recall"])
    for row in rows:
        w.writerow([row.category, row.true_positives, row.false_negatives,
                    row.render_recall()])
    _write(Path(path), buf.getvalue())
