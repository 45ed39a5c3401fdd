"""Differential execution harness.

Runs a family workload against the fault-free reference and against every
mutant, each from a freshly initialized ledger, and pairs the transactions
positionally for comparison. Mutant runs are independent, so campaigns can
fan out over processes; results are keyed by mutant label and merged in
label order, making output bytes independent of worker count.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .config import CampaignConfig
from .corpus import ContractFamily, VARIANTS, load_family
from .lang import check, parse
from .lang.typecheck import CheckedContract
from .mutate import load_inventory
from .vm import (
    DeployError, LedgerState, TxRecord, TxStatus, VmConfig, deploy, execute,
    query, record_from_json,
)
from .workload import Actor, TestSequence, augment_sequence


class LengthMismatch(Exception):
    pass


@dataclass
class RunTrace:
    label: str
    records: list[TxRecord] = field(default_factory=list)
    final_dump: str = ""
    deploy_failure: TxStatus | None = None

    def to_json(self) -> dict:
        out: dict = {
            "label": self.label,
            "records": [r.to_json() for r in self.records],
            "final_dump": self.final_dump,
        }
        if self.deploy_failure is not None:
            out["deploy_failure"] = self.deploy_failure.to_json()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "RunTrace":
        return cls(
            label=obj["label"],
            records=[record_from_json(r) for r in obj["records"]],
            final_dump=obj["final_dump"],
            deploy_failure=TxStatus.from_json(obj["deploy_failure"])
            if "deploy_failure" in obj else None,
        )


@dataclass(frozen=True)
class DiffRow:
    index: int
    is_query: bool
    reference: TxRecord
    mutant: TxRecord

    @property
    def status_divergence(self) -> bool:
        return self.reference.status != self.mutant.status

    @property
    def return_divergence(self) -> bool:
        return self.reference.returns != self.mutant.returns

    @property
    def rw_divergence(self) -> bool:
        return (self.reference.reads != self.mutant.reads
                or self.reference.writes != self.mutant.writes)


@dataclass
class PairedDiff:
    reference_label: str
    mutant_label: str
    rows: list[DiffRow] = field(default_factory=list)
    mutant_deploy_failure: TxStatus | None = None


def run(checked: CheckedContract, workload: TestSequence, config: VmConfig,
        actors: tuple[Actor, ...], label: str) -> RunTrace:
    """Execute the workload from a fresh funded ledger; one record per call."""
    ledger = LedgerState.genesis(
        [(a.name, a.initial_balance) for a in actors],
        width=config.default_int_width)
    try:
        ledger = deploy(checked, ledger, config, deployer=actors[0].name)
    except DeployError as exc:
        return RunTrace(label=label, deploy_failure=exc.status,
                        final_dump=ledger.dump())
    trace = RunTrace(label=label)
    for call in workload.calls:
        fn = checked.functions[call.function]
        if fn.mutability == "query":
            rec = query(call, ledger, config)
        else:
            rec, ledger = execute(call, ledger, config)
        trace.records.append(rec)
    trace.final_dump = ledger.dump()
    return trace


def diff(reference: RunTrace, mutant: RunTrace,
         base: CheckedContract) -> PairedDiff:
    """Pair the traces positionally; flags are derived from the records."""
    out = PairedDiff(reference.label, mutant.label,
                     mutant_deploy_failure=mutant.deploy_failure)
    if mutant.deploy_failure is not None:
        return out
    if len(reference.records) != len(mutant.records):
        raise LengthMismatch(
            f"{reference.label} has {len(reference.records)} records, "
            f"{mutant.label} has {len(mutant.records)}")
    for i, (ref, mut) in enumerate(zip(reference.records, mutant.records)):
        if ref.call.function != mut.call.function:
            raise LengthMismatch(
                f"workload mismatch at index {i}: "
                f"{ref.call.function} vs {mut.call.function}")
        is_query = base.functions[ref.call.function].mutability == "query"
        out.rows.append(DiffRow(i, is_query, ref, mut))
    return out


# ── campaign orchestration ───────────────────────────────────────────────


def _canonical_json(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _family_workload(family: ContractFamily, cfg: CampaignConfig) -> TestSequence:
    if cfg.augment > 0:
        return augment_sequence(family.workload, family.checked["base"],
                                cfg.seed, per_function_cap=cfg.augment,
                                actors=cfg.actors)
    return family.workload


def _run_batch(args: tuple) -> list[tuple[str, dict]]:
    """Worker entry: run a batch of mutant sources for one family variant."""
    corpus_dir, family_name, sol_paths, cfg_json = args
    cfg = CampaignConfig.from_json(json.loads(cfg_json))
    family = load_family(corpus_dir, family_name, cfg.actors)
    workload = _family_workload(family, cfg)
    out = []
    for path in sol_paths:
        label = Path(path).stem
        checked = check(parse(Path(path).read_text(encoding="utf-8")))
        trace = run(checked, workload, cfg.vm, cfg.actors, label)
        out.append((label, trace.to_json()))
    return out


@dataclass
class CampaignResult:
    """Index of everything one campaign produced (traces live on disk)."""

    results_dir: Path
    families: list[str]
    references: dict[tuple[str, str], str] = field(default_factory=dict)
    mutants: dict[tuple[str, str], list[str]] = field(default_factory=dict)
    failures: list[dict] = field(default_factory=list)

    def trace_path(self, family: str, variant: str, label: str) -> Path:
        return self.results_dir / family / variant / f"{label}.trace.json"

    def load_trace(self, family: str, variant: str, label: str) -> RunTrace:
        return RunTrace.from_json(json.loads(
            self.trace_path(family, variant, label).read_text(encoding="utf-8")))


def reference_label(family: str, variant: str) -> str:
    return f"{family}_{variant}_reference"


def load_summary(cfg: CampaignConfig) -> dict:
    path = Path(cfg.results) / "summary.json"
    if not path.exists():
        raise FileNotFoundError(f"no campaign summary at {path}; run first")
    return json.loads(path.read_text(encoding="utf-8"))


def iter_campaign_diffs(cfg: CampaignConfig):
    """Yield (family, variant, label, PairedDiff) for every mutant trace in
    the results directory, in deterministic label order."""
    summary = load_summary(cfg)
    results_dir = Path(cfg.results)
    for family_name in sorted(summary["families"]):
        base = load_family(cfg.corpus, family_name, cfg.actors).checked["base"]
        fam = summary["families"][family_name]
        for variant in VARIANTS:
            vdir = results_dir / family_name / variant
            ref_label = reference_label(family_name, variant)
            reference = RunTrace.from_json(json.loads(
                (vdir / f"{ref_label}.trace.json").read_text(encoding="utf-8")))
            for label in sorted(fam[variant]["mutants"]):
                mutant = RunTrace.from_json(json.loads(
                    (vdir / f"{label}.trace.json").read_text(encoding="utf-8")))
                yield family_name, variant, label, diff(reference, mutant, base)


def run_campaign(cfg: CampaignConfig) -> CampaignResult:
    """Run references and all materialized mutants; write traces and
    ``results/summary.json``. Requires the mutant tree under ``cfg.out``."""
    results_dir = Path(cfg.results)
    family_names = list(cfg.families) or sorted(
        p.name for p in Path(cfg.out).iterdir() if (p / "manifest.json").exists())
    result = CampaignResult(results_dir, family_names)
    summary: dict = {"families": {}, "config": cfg.to_json()}
    cfg_json = json.dumps(cfg.to_json())

    batches: list[tuple] = []
    for name in family_names:
        inventory = load_inventory(cfg.out, name)
        for variant in VARIANTS:
            labels = [m["label"] for m in inventory["variants"][variant]["mutants"]]
            paths = [str(Path(cfg.out) / name / variant / f"{lbl}.sol")
                     for lbl in labels]
            for i in range(0, len(paths), 16):
                batches.append((cfg.corpus, name, paths[i:i + 16], cfg_json))
            result.mutants[(name, variant)] = labels

    collected: dict[str, dict] = {}
    if cfg.workers > 1 and batches:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for batch_out in pool.map(_run_batch, batches):
                for label, trace_json in batch_out:
                    collected[label] = trace_json
    else:
        for batch in batches:
            for label, trace_json in _run_batch(batch):
                collected[label] = trace_json

    for name in family_names:
        family = load_family(cfg.corpus, name, cfg.actors)
        workload = _family_workload(family, cfg)
        fam_summary: dict = {}
        for variant in VARIANTS:
            vdir = results_dir / name / variant
            vdir.mkdir(parents=True, exist_ok=True)
            ref_label = reference_label(name, variant)
            ref_trace = run(family.checked[variant], workload, cfg.vm,
                            cfg.actors, ref_label)
            ref_text = _canonical_json(ref_trace.to_json())
            (vdir / f"{ref_label}.trace.json").write_text(ref_text, encoding="utf-8")
            result.references[(name, variant)] = ref_label
            entries = {}
            for label in result.mutants[(name, variant)]:
                text = _canonical_json(collected[label])
                (vdir / f"{label}.trace.json").write_text(text, encoding="utf-8")
                entries[label] = _sha(text)
            fam_summary[variant] = {
                "reference": {ref_label: _sha(ref_text)},
                "mutants": entries,
                "workload_length": len(workload),
            }
        summary["families"][name] = fam_summary
    (results_dir / "summary.json").write_text(
        _canonical_json(summary), encoding="utf-8")
    return result
