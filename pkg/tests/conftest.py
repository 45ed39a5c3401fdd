from __future__ import annotations

import sys
from pathlib import Path

import pytest
from hypothesis import settings

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

settings.register_profile("suite", deadline=None, derandomize=True)
settings.load_profile("suite")

CORPUS = ROOT / "corpus"
FAMILIES = ("escrow", "state_machine", "storage", "token", "wallet")


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS


@pytest.fixture(scope="session")
def families():
    from solfault.corpus import load_corpus
    return load_corpus(CORPUS)


@pytest.fixture(scope="session")
def wallet_family():
    from solfault.corpus import load_family
    return load_family(CORPUS, "wallet")


@pytest.fixture(scope="session")
def full_manifest():
    from solfault.catalog import catalog
    return catalog()


@pytest.fixture(scope="session")
def campaign(tmp_path_factory, families):
    """One shared full campaign run (mutate + run) for the heavier tests."""
    from solfault.config import CampaignConfig
    from solfault.catalog import catalog
    from solfault.harness import run_campaign
    from solfault.mutate import generate, write_mutant_tree

    root = tmp_path_factory.mktemp("campaign")
    cfg = CampaignConfig(
        corpus=str(CORPUS),
        out=str(root / "out"),
        results=str(root / "results"),
        report=str(root / "report"),
        verdicts=str(root / "verdicts"),
    )
    manifest = catalog()
    for family in families:
        write_mutant_tree(cfg.out, family, generate(family, manifest), manifest)
    result = run_campaign(cfg)
    return cfg, result
