"""Batch command-line front end.

Pipeline: mutate -> (verify) -> run -> classify -> report, plus the
timeout-campaign mode that drives one loop-fault mutant long enough to hit
the platform timeout instead of the gas check.

Exit codes: 0 success, 1 usage error, 2 campaign-level failure.
Diagnostics go to stderr; data goes to files only.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import catalog as cat
from . import classify as cls
from . import mutate as mut
from . import verifier as ver
from .config import CampaignConfig
from .corpus import VARIANTS, load_corpus, load_family
from .harness import (
    iter_campaign_diffs, load_summary, reference_label, run_campaign,
)
from .lang import check, parse
from .vm import LedgerState, VmConfig, deploy, execute


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: A003 - argparse hook
        raise UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="solfault", description=__doc__)
    p.add_argument("--config", help="campaign config file (JSON)")
    p.add_argument("--corpus", help="corpus directory")
    p.add_argument("--out", help="mutant tree directory")
    p.add_argument("--results", help="campaign results directory")
    p.add_argument("--report", help="report export directory")
    p.add_argument("--verdicts", help="verdict archive directory")
    p.add_argument("--seed", type=int, help="campaign seed")
    p.add_argument("--workers", type=int, help="parallel worker count")
    p.add_argument("--families", help="comma-separated family subset")
    p.add_argument("--verifier",
                   choices=["none", "stub", "replay", "command", "oracle"])
    p.add_argument("--verifier-config", help="command adapter config file")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("mutate", help="enumerate sites and materialize mutants")
    m.add_argument("--only", help="comma-separated operator codes to enable")
    m.add_argument("--disable", help="comma-separated operator codes to disable")

    sub.add_parser("verify", help="record verifier verdicts for all contracts")
    sub.add_parser("run", help="execute reference and mutant traces")
    sub.add_parser("classify", help="compute outcome vectors (outcomes.csv)")
    sub.add_parser("report", help="emit funnel, recall and outcome exports")

    t = sub.add_parser("timeout-campaign",
                       help="drive a loop-fault mutant into the platform timeout")
    t.add_argument("--family", default="token")
    t.add_argument("--faulty-function", default="batchTransfer")
    t.add_argument("--fault-free-function", default="transfer")
    t.add_argument("--warmup", type=int, default=400)
    t.add_argument("--faulty", type=int, default=200)
    t.add_argument("--cooldown", type=int, default=400)
    t.add_argument("--timeout-budget", type=int,
                   help="override the timeout step budget")
    return p


def _config_from_args(args: argparse.Namespace) -> CampaignConfig:
    cfg = CampaignConfig.load(args.config) if args.config else CampaignConfig()
    for attr in ("corpus", "out", "results", "report", "verdicts",
                 "seed", "workers", "verifier"):
        v = getattr(args, attr, None)
        if v is not None:
            setattr(cfg, attr, v)
    if getattr(args, "verifier_config", None):
        cfg.verifier_config = args.verifier_config
    if getattr(args, "families", None):
        cfg.families = tuple(args.families.split(","))
    return cfg


# ── commands ─────────────────────────────────────────────────────────────


def cmd_mutate(cfg: CampaignConfig, args: argparse.Namespace) -> int:
    only = tuple(args.only.split(",")) if args.only else ()
    disable = tuple(args.disable.split(",")) if args.disable else ()
    try:
        manifest = cat.catalog(only=only, disable=disable)
    except KeyError as exc:
        raise UsageError(str(exc)) from None
    out_root = Path(cfg.out)
    out_root.mkdir(parents=True, exist_ok=True)
    (out_root / "operators.manifest").write_text(
        manifest.to_text(), encoding="utf-8")
    total = 0
    for family in load_corpus(cfg.corpus, cfg.families, cfg.actors):
        sets = mut.generate(family, manifest)
        inventory = mut.write_mutant_tree(cfg.out, family, sets, manifest)
        for variant in VARIANTS:
            n = len(inventory["variants"][variant]["mutants"])
            total += n
            if n == 0:
                print(f"warning: {family.name}/{variant} yields zero mutants",
                      file=sys.stderr)
    print(f"materialized {total} mutants under {cfg.out}", file=sys.stderr)
    return 0


def cmd_run(cfg: CampaignConfig, args: argparse.Namespace) -> int:
    result = run_campaign(cfg)
    n = sum(len(v) for v in result.mutants.values())
    print(f"ran {n} mutant traces plus references into {cfg.results}",
          file=sys.stderr)
    if result.failures:
        print(f"{len(result.failures)} mutant runs failed", file=sys.stderr)
        return 2
    return 0


def _campaign_vectors(cfg: CampaignConfig):
    vectors: dict[str, cls.OutcomeVector] = {}
    evidence: dict[str, cls.AbortEvidence] = {}
    for _family, _variant, label, d in iter_campaign_diffs(cfg):
        vectors[label] = cls.classify(d)
        evidence[label] = cls.abort_evidence(d)
    return vectors, evidence


def cmd_verify(cfg: CampaignConfig, args: argparse.Namespace) -> int:
    if cfg.verifier == "none":
        raise UsageError("verify needs --verifier stub|replay|command|oracle")
    archive = Path(cfg.verdicts)
    if cfg.verifier == "oracle":
        # verdicts derive from the campaign traces; references are the
        # comparison baseline and verify as Safe by construction
        count = 0
        for family, variant, label, d in iter_campaign_diffs(cfg):
            ver.archive_verdict(archive, ver.oracle_verdict(d))
            count += 1
        summary = load_summary(cfg)
        for family in sorted(summary["families"]):
            for variant in VARIANTS:
                label = reference_label(family, variant)
                ver.archive_verdict(archive, ver.VerifierVerdict(
                    label, ver.SAFE, tool="semantic-oracle", tool_version="1"))
                count += 1
        print(f"archived {count} oracle verdicts into {archive}", file=sys.stderr)
        return 0
    if cfg.verifier == "stub":
        adapter = ver.StubAdapter()
    elif cfg.verifier == "replay":
        adapter = ver.ReplayAdapter(cfg.verdicts)
    else:
        if not cfg.verifier_config:
            raise UsageError("command adapter needs --verifier-config")
        adapter = ver.CommandAdapter.from_config(cfg.verifier_config)
    count = 0
    for family in load_corpus(cfg.corpus, cfg.families, cfg.actors):
        spec_path = str(family.spec_path)
        inventory = mut.load_inventory(cfg.out, family.name)
        for variant in VARIANTS:
            source = Path(cfg.corpus) / family.name / f"{variant}.sol"
            label = reference_label(family.name, variant)
            ver.archive_verdict(archive, adapter.verify(label, str(source), spec_path))
            count += 1
            for entry in inventory["variants"][variant]["mutants"]:
                sol = Path(cfg.out) / family.name / variant / f"{entry['label']}.sol"
                verdict = adapter.verify(entry["label"], str(sol), spec_path)
                ver.archive_verdict(archive, verdict)
                count += 1
    print(f"archived {count} verdicts into {archive}", file=sys.stderr)
    return 0


def cmd_classify(cfg: CampaignConfig, args: argparse.Namespace) -> int:
    vectors, _ = _campaign_vectors(cfg)
    out = Path(cfg.report) / "outcomes.csv"
    cls.export_outcomes_csv(out, vectors)
    print(f"classified {len(vectors)} mutants into {out}", file=sys.stderr)
    return 0


def cmd_report(cfg: CampaignConfig, args: argparse.Namespace) -> int:
    vectors, evidence = _campaign_vectors(cfg)
    report_dir = Path(cfg.report)
    cls.export_outcomes_csv(report_dir / "outcomes.csv", vectors)
    verdicts = None
    if cfg.verifier != "none":
        verdicts = ver.load_verdicts(cfg.verdicts)
        if not verdicts:
            print(f"no verdicts under {cfg.verdicts}; run verify first",
                  file=sys.stderr)
            return 2
    records, counts = cls.funnel(vectors, evidence, verdicts)
    cls.export_funnel(report_dir / "funnel.json", report_dir / "funnel.csv",
                      records, counts)
    if verdicts is not None:
        summary = load_summary(cfg)
        reference_labels = {
            reference_label(f, v)
            for f in summary["families"] for v in VARIANTS
        }
        confusion = ver.confusion(verdicts, set(vectors), reference_labels)
        rows = cls.recall(vectors, confusion.labels)
        cls.export_recall_csv(report_dir / "recall.csv", rows)
    print(f"wrote report exports into {report_dir}", file=sys.stderr)
    return 0


def _find_loop_site(checked, function: str) -> int:
    from .lang import nodes as N
    fn = checked.functions[function]
    for node in N.walk(fn):
        if isinstance(node, N.For) and node.update is not None:
            return node.update.node_id
    raise UsageError(f"{function} has no loop with an update clause")


def cmd_timeout_campaign(cfg: CampaignConfig, args: argparse.Namespace) -> int:
    family = load_family(cfg.corpus, args.family, cfg.actors)
    checked = family.checked["base"]
    site = _find_loop_site(checked, args.faulty_function)
    mutated = cat.apply(cat.operator("MLC"), checked, site)
    contract = check(mutated)
    for name in (args.faulty_function, args.fault_free_function):
        if name not in contract.functions:
            raise UsageError(f"unknown function {name!r} in {args.family}")

    timeout_budget = args.timeout_budget or cfg.vm.timeout_budget
    vm = VmConfig(step_budget=None, timeout_budget=timeout_budget,
                  default_int_width=cfg.vm.default_int_width,
                  checked_arithmetic=cfg.vm.checked_arithmetic)
    ledger = LedgerState.genesis(
        [(a.name, a.initial_balance) for a in cfg.actors],
        width=vm.default_int_width)
    ledger = deploy(contract, ledger, vm, deployer=cfg.actors[0].name)

    from .lang.values import Value, addrval
    from .lang import types as T
    from .vm import TxCall
    width = vm.default_int_width
    owner = cfg.actors[0].name
    recipient = cfg.actors[1].name
    fault_free = TxCall(owner, args.fault_free_function,
                        (addrval(recipient), Value(T.uint(width), 1)))
    faulty = TxCall(owner, args.faulty_function,
                    (Value(T.ArrayType(T.ADDRESS), (addrval(recipient),)),
                     Value(T.ArrayType(T.uint(width)), (Value(T.uint(width), 1),))))

    segments = (("warmup", fault_free, args.warmup),
                ("faulty", faulty, args.faulty),
                ("cooldown", fault_free, args.cooldown))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "segment", "function", "status", "steps"])
    index = 0
    for segment, call, count in segments:
        for _ in range(count):
            rec, ledger = execute(call, ledger, vm)
            w.writerow([index, segment, call.function, rec.status.kind, rec.steps])
            index += 1
    out = Path(cfg.report) / "timeout_campaign.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(buf.getvalue(), encoding="utf-8")
    print(f"wrote {index} call records into {out}", file=sys.stderr)
    return 0


COMMANDS = {
    "mutate": cmd_mutate,
    "verify": cmd_verify,
    "run": cmd_run,
    "classify": cmd_classify,
    "report": cmd_report,
    "timeout-campaign": cmd_timeout_campaign,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _config_from_args(args)
        return COMMANDS[args.command](cfg, args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ver.MissingVerdict, cls.MissingInput, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
