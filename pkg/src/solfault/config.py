"""Campaign configuration.

A campaign is fully reproducible from (corpus, config): the config carries
every knob that influences generated bytes. The file format is JSON with
the same field names.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .vm import VmConfig
from .workload import DEFAULT_ACTORS, Actor


@dataclass
class CampaignConfig:
    corpus: str = "corpus"
    out: str = "out"
    results: str = "results"
    report: str = "report"
    verdicts: str = "verdicts"
    seed: int = 20200811
    workers: int = 1
    families: tuple[str, ...] = ()
    only_operators: tuple[str, ...] = ()
    disable_operators: tuple[str, ...] = ()
    verifier: str = "none"  # none | stub | replay | command | oracle
    verifier_config: str = ""  # adapter config file for the command adapter
    augment: int = 0  # generated calls appended per function (0 disables)
    vm: VmConfig = field(default_factory=VmConfig)
    actors: tuple[Actor, ...] = DEFAULT_ACTORS

    def to_json(self) -> dict:
        return {
            "corpus": self.corpus,
            "out": self.out,
            "results": self.results,
            "report": self.report,
            "verdicts": self.verdicts,
            "seed": self.seed,
            "workers": self.workers,
            "families": list(self.families),
            "only_operators": list(self.only_operators),
            "disable_operators": list(self.disable_operators),
            "verifier": self.verifier,
            "verifier_config": self.verifier_config,
            "augment": self.augment,
            "vm": self.vm.to_json(),
            "actors": [
                {"name": a.name, "initial_balance": a.initial_balance}
                for a in self.actors
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CampaignConfig":
        kwargs = dict(obj)
        if "vm" in kwargs:
            kwargs["vm"] = VmConfig.from_json(kwargs["vm"])
        if "actors" in kwargs:
            kwargs["actors"] = tuple(
                Actor(a["name"], a["initial_balance"]) for a in kwargs["actors"])
        for key in ("families", "only_operators", "disable_operators"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)

    @classmethod
    def load(cls, path: str | Path) -> "CampaignConfig":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8")
