"""Mutant enumeration and materialization: one fault per mutant.

Sites are enumerated per enabled operator over the checked AST, ordered by
(operator code, preorder NodeId); every (site, alternative) pair becomes a
mutant unless the edit fails type checking, in which case the site lands in
the skipped report with its reason. Mutants are materialized as source
files so the VM and the verifier consume identical artifacts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import catalog as cat
from .corpus import ContractFamily, VARIANTS
from .lang import nodes as N
from .lang.printer import print_contract
from .lang.typecheck import CheckedContract


@dataclass
class Mutant:
    family: str
    variant: str
    operator: str
    site: int
    alt: int
    ast: N.Contract
    source: str

    @property
    def label(self) -> str:
        return f"{self.family}_{self.variant}_{self.operator}_{self.site}_{self.alt}"


@dataclass
class SkippedSite:
    operator: str
    site: int
    alt: int
    reason: str


@dataclass
class MutantSet:
    family: str
    variant: str
    mutants: list[Mutant] = field(default_factory=list)
    skipped: list[SkippedSite] = field(default_factory=list)


def enumerate_sites(checked: CheckedContract,
                    manifest: cat.CatalogManifest) -> list[tuple[str, int, int]]:
    """All (operator code, NodeId, alternative count) injection sites under
    the enabled operators, ordered by (code, preorder id)."""
    ctx = cat.SiteContext(checked)
    out: list[tuple[str, int, int]] = []
    for op in sorted(manifest.operators, key=lambda o: o.code):
        for node in N.walk(checked.contract):
            if cat.matches(op, node, ctx):
                out.append((op.code, node.node_id,
                            cat.alternative_count(op, node, ctx)))
    return out


def generate_variant(family: str, variant: str, checked: CheckedContract,
                     manifest: cat.CatalogManifest) -> MutantSet:
    result = MutantSet(family, variant)
    for code, site, n_alts in enumerate_sites(checked, manifest):
        op = cat.operator(code)
        for alt in range(n_alts):
            try:
                mutated = cat.apply(op, checked, site, alt)
            except cat.IllegalMutant as exc:
                result.skipped.append(SkippedSite(code, site, alt, str(exc)))
                continue
            result.mutants.append(Mutant(
                family=family, variant=variant, operator=code, site=site,
                alt=alt, ast=mutated, source=print_contract(mutated)))
    return result


def generate(family: ContractFamily,
             manifest: cat.CatalogManifest) -> dict[str, MutantSet]:
    """One MutantSet per variant of the family."""
    return {
        variant: generate_variant(family.name, variant,
                                  family.checked[variant], manifest)
        for variant in VARIANTS
    }


def _dump_json(path: Path, obj: object) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def write_mutant_tree(out_dir: str | Path, family: ContractFamily,
                      sets: dict[str, MutantSet],
                      manifest: cat.CatalogManifest) -> dict:
    """Materialize ``out/<family>/<variant>/<label>.sol`` plus the family
    inventory ``out/<family>/manifest.json``; returns the inventory dict."""
    root = Path(out_dir) / family.name
    inventory: dict = {
        "family": family.name,
        "catalog_version": manifest.version,
        "variants": {},
    }
    for variant in VARIANTS:
        mset = sets[variant]
        vdir = root / variant
        vdir.mkdir(parents=True, exist_ok=True)
        entries = []
        for m in mset.mutants:
            (vdir / f"{m.label}.sol").write_text(m.source, encoding="utf-8")
            op = cat.operator(m.operator)
            entries.append({
                "label": m.label,
                "operator": m.operator,
                "origin": op.origin,
                "odc_type": op.odc_type,
                "qualifier": op.qualifier,
                "site": m.site,
                "alt": m.alt,
            })
        inventory["variants"][variant] = {
            "mutants": entries,
            "skipped": [
                {"operator": s.operator, "site": s.site, "alt": s.alt,
                 "reason": s.reason}
                for s in mset.skipped
            ],
        }
    _dump_json(root / "manifest.json", inventory)
    return inventory


def load_inventory(out_dir: str | Path, family: str) -> dict:
    path = Path(out_dir) / family / "manifest.json"
    return json.loads(path.read_text(encoding="utf-8"))
