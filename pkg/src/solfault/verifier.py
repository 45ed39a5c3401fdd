"""Verifier bridge: pluggable pre-deployment verification verdicts.

Adapters:
  stub     — fixed verdict, for wiring tests;
  command  — invokes an external verifier from a command template with
             {source}/{spec} placeholders and regex parse rules;
  replay   — returns verdicts recorded earlier in the archive;
  oracle   — semantic stand-in labelling a mutant Unsafe from its own
             differential trace (assert or checked-overflow aborts, runaway
             execution the reference did not show, or read-write-set
             divergence). The real tool's liveness blind spot is mirrored
             by default: divergence that is nothing but extra
             require/revert aborts stays Safe.

Every invocation yields a verdict (ToolError is a verdict too); verdicts
are archived one JSON record per label and can be replayed hermetically.
"""

from __future__ import annotations

import json
import re
import subprocess
from dataclasses import dataclass, field
from pathlib import Path

from .harness import PairedDiff

SAFE, UNSAFE, TIMEOUT, TOOL_ERROR = "Safe", "Unsafe", "Timeout", "ToolError"


@dataclass(frozen=True)
class VerifierVerdict:
    label: str
    verdict: str  # Safe | Unsafe | Timeout | ToolError
    findings: tuple[str, ...] = ()
    tool: str = "stub"
    tool_version: str = "0"
    duration_ticks: int = 0

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "verdict": self.verdict,
            "findings": list(self.findings),
            "tool": self.tool,
            "tool_version": self.tool_version,
            "duration_ticks": self.duration_ticks,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "VerifierVerdict":
        return cls(
            label=obj["label"], verdict=obj["verdict"],
            findings=tuple(obj["findings"]), tool=obj["tool"],
            tool_version=obj["tool_version"],
            duration_ticks=obj["duration_ticks"],
        )


class MissingVerdict(Exception):
    def __init__(self, labels: list[str]):
        self.labels = labels
        super().__init__(f"no verdict for: {', '.join(labels)}")


# ── adapters ─────────────────────────────────────────────────────────────


@dataclass
class StubAdapter:
    verdict: str = SAFE

    def verify(self, label: str, source_path: str, spec_path: str) -> VerifierVerdict:
        return VerifierVerdict(label, self.verdict, tool="stub")


@dataclass
class ReplayAdapter:
    archive_dir: str

    def verify(self, label: str, source_path: str, spec_path: str) -> VerifierVerdict:
        path = Path(self.archive_dir) / f"{label}.json"
        if not path.exists():
            raise MissingVerdict([label])
        return VerifierVerdict.from_json(
            json.loads(path.read_text(encoding="utf-8")))


@dataclass
class CommandAdapter:
    """Runs `command` with {source}/{spec} substituted; classifies stdout+stderr
    by the unsafe/safe regular expressions (unsafe wins)."""

    command: str
    safe_pattern: str
    unsafe_pattern: str
    timeout_seconds: float = 60.0
    tool: str = "external"
    tool_version: str = "unknown"

    @classmethod
    def from_config(cls, path: str) -> "CommandAdapter":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            command=obj["command"],
            safe_pattern=obj["safe_pattern"],
            unsafe_pattern=obj["unsafe_pattern"],
            timeout_seconds=obj.get("timeout_seconds", 60.0),
            tool=obj.get("tool", "external"),
            tool_version=obj.get("tool_version", "unknown"),
        )

    def verify(self, label: str, source_path: str, spec_path: str) -> VerifierVerdict:
        cmd = self.command.format(source=source_path, spec=spec_path)
        try:
            proc = subprocess.run(
                cmd, shell=True, capture_output=True, text=True,
                timeout=self.timeout_seconds)
        except subprocess.TimeoutExpired:
            return VerifierVerdict(label, TIMEOUT, tool=self.tool,
                                   tool_version=self.tool_version)
        output = proc.stdout + proc.stderr
        unsafe_hits = re.findall(self.unsafe_pattern, output, re.MULTILINE)
        if unsafe_hits:
            return VerifierVerdict(
                label, UNSAFE, findings=tuple(str(h) for h in unsafe_hits),
                tool=self.tool, tool_version=self.tool_version)
        if re.search(self.safe_pattern, output, re.MULTILINE):
            return VerifierVerdict(label, SAFE, tool=self.tool,
                                   tool_version=self.tool_version)
        return VerifierVerdict(
            label, TOOL_ERROR,
            findings=(f"exit={proc.returncode}, unparseable output",),
            tool=self.tool, tool_version=self.tool_version)


def oracle_verdict(diff: PairedDiff, revert_blind_spot: bool = True) -> VerifierVerdict:
    """Perfect-dynamic-oracle verdict for a mutant from its paired trace."""
    label = diff.mutant_label
    findings: list[str] = []
    dep = diff.mutant_deploy_failure
    if dep is not None:
        if dep.kind == "aborted_assert" or (
                dep.kind == "aborted_builtin" and dep.reason == "checked-overflow"):
            findings.append("deploy: unexpected failure")
        elif dep.kind in ("aborted_gas", "aborted_timeout"):
            findings.append("deploy: runaway execution")
        elif not revert_blind_spot:
            findings.append("deploy: reverts where reference constructs")
    for row in diff.rows:
        ref, mut = row.reference, row.mutant
        matching_abort = not ref.status.committed and not mut.status.committed
        if matching_abort:
            continue
        if mut.status.kind == "aborted_assert" or (
                mut.status.kind == "aborted_builtin"
                and mut.status.reason == "checked-overflow"):
            findings.append(f"tx {row.index}: unexpected failure")
            continue
        if mut.status.gas_or_timeout and ref.status.committed:
            findings.append(f"tx {row.index}: runaway execution")
            continue
        if mut.status.committed and not ref.status.committed:
            findings.append(f"tx {row.index}: concludes where reference aborts")
            continue
        if mut.status.committed and ref.status.committed and row.rw_divergence:
            findings.append(f"tx {row.index}: read-write set diverges")
            continue
        if not revert_blind_spot and not mut.status.committed and ref.status.committed:
            findings.append(f"tx {row.index}: reverts where reference concludes")
    verdict = UNSAFE if findings else SAFE
    return VerifierVerdict(label, verdict, findings=tuple(findings),
                           tool="semantic-oracle", tool_version="1")


# ── archive and confusion counts ─────────────────────────────────────────


def archive_verdict(archive_dir: str | Path, verdict: VerifierVerdict,
                    raw_output: str | None = None) -> None:
    root = Path(archive_dir)
    root.mkdir(parents=True, exist_ok=True)
    (root / f"{verdict.label}.json").write_text(
        json.dumps(verdict.to_json(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8")
    if raw_output is not None:
        (root / f"{verdict.label}.out").write_text(raw_output, encoding="utf-8")


def load_verdicts(archive_dir: str | Path) -> dict[str, VerifierVerdict]:
    root = Path(archive_dir)
    out: dict[str, VerifierVerdict] = {}
    if not root.exists():
        return out
    for path in sorted(root.glob("*.json")):
        v = VerifierVerdict.from_json(json.loads(path.read_text(encoding="utf-8")))
        out[v.label] = v
    return out


TRUE_POSITIVE = "true_positive"
TRUE_NEGATIVE = "true_negative"
FALSE_POSITIVE = "false_positive"
FALSE_NEGATIVE = "false_negative"


@dataclass
class ConfusionResult:
    labels: dict[str, str] = field(default_factory=dict)
    excluded: dict[str, str] = field(default_factory=dict)  # label -> Timeout/ToolError
    counts: dict[str, int] = field(default_factory=lambda: {
        TRUE_POSITIVE: 0, TRUE_NEGATIVE: 0,
        FALSE_POSITIVE: 0, FALSE_NEGATIVE: 0,
    })


def confusion(verdicts: dict[str, VerifierVerdict], mutant_labels: set[str],
              reference_labels: set[str]) -> ConfusionResult:
    """Confusion labels: a mutant flagged Unsafe is a true positive, a
    reference flagged Unsafe a false positive, and so on. Timeout/ToolError
    verdicts are excluded from the counts and reported separately."""
    everything = mutant_labels | reference_labels
    missing = sorted(everything - set(verdicts))
    if missing:
        raise MissingVerdict(missing)
    out = ConfusionResult()
    for label in sorted(everything):
        v = verdicts[label]
        if v.verdict in (TIMEOUT, TOOL_ERROR):
            out.excluded[label] = v.verdict
            continue
        is_mutant = label in mutant_labels
        unsafe = v.verdict == UNSAFE
        if is_mutant:
            cls = TRUE_POSITIVE if unsafe else FALSE_NEGATIVE
        else:
            cls = FALSE_POSITIVE if unsafe else TRUE_NEGATIVE
        out.labels[label] = cls
        out.counts[cls] += 1
    return out
