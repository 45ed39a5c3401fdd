"""Contract-family loading.

A family directory holds base/stripped/protected sources, one shared
workload, and an opaque specification bundle for the verifier bridge:

    corpus/<family>/{base,stripped,protected}.sol
    corpus/<family>/workload.seq
    corpus/<family>/spec.txt
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .lang import check, parse
from .lang.typecheck import CheckedContract
from .workload import DEFAULT_ACTORS, Actor, TestSequence, load_sequence

VARIANTS = ("base", "stripped", "protected")


@dataclass
class ContractFamily:
    name: str
    path: Path
    checked: dict[str, CheckedContract]
    sources: dict[str, str]
    workload: TestSequence
    spec_path: Path

    def variant(self, name: str) -> CheckedContract:
        return self.checked[name]


def interface_signature(checked: CheckedContract) -> list[tuple]:
    return sorted(
        (f.name, tuple(p.type.render() for p in f.params), f.mutability)
        for f in checked.public_functions()
    )


def load_family(corpus_dir: str | Path, name: str,
                actors: tuple[Actor, ...] = DEFAULT_ACTORS) -> ContractFamily:
    path = Path(corpus_dir) / name
    sources: dict[str, str] = {}
    checked: dict[str, CheckedContract] = {}
    for variant in VARIANTS:
        src = (path / f"{variant}.sol").read_text(encoding="utf-8")
        sources[variant] = src
        checked[variant] = check(parse(src))
    base_sig = interface_signature(checked["base"])
    for variant in ("stripped", "protected"):
        if interface_signature(checked[variant]) != base_sig:
            raise ValueError(
                f"{name}/{variant}: public interface differs from base")
    workload = load_sequence(str(path / "workload.seq"), name,
                             checked["base"], actors)
    return ContractFamily(
        name=name, path=path, checked=checked, sources=sources,
        workload=workload, spec_path=path / "spec.txt")


def discover_families(corpus_dir: str | Path) -> list[str]:
    root = Path(corpus_dir)
    return sorted(
        p.name for p in root.iterdir()
        if p.is_dir() and (p / "base.sol").exists()
    )


def load_corpus(corpus_dir: str | Path, families: tuple[str, ...] = (),
                actors: tuple[Actor, ...] = DEFAULT_ACTORS) -> list[ContractFamily]:
    names = list(families) if families else discover_families(corpus_dir)
    return [load_family(corpus_dir, n, actors) for n in names]
