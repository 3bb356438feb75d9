"""INI-style configuration shared by the library entry points and the CLI.

Example::

    [normalize]
    latex_strip_list = displaystyle, mathrm, left, right
    table_drop_attrs = style, class

    [match]
    threshold = 0.4
    category_must_agree = true

    [reward]
    weights = 0.4, 0.3, 0.3

    [mining]
    range = 0.5, 0.8

    [evaluate]
    workers = 4
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from pathlib import Path

from .matching import MatchConfig
from .normalize import NormalizationConfig, _parse_bool
from .reward import MiningConfig, RewardWeights

ENV_VAR = "LAYOUTMETRICS_CONFIG"


@dataclass(frozen=True)
class Settings:
    normalize: NormalizationConfig = field(default_factory=NormalizationConfig)
    match: MatchConfig = field(default_factory=MatchConfig)
    weights: RewardWeights = field(default_factory=RewardWeights)
    mining: MiningConfig = field(default_factory=MiningConfig)
    workers: int = 1

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")


def load_settings(path: str | Path | None = None) -> Settings:
    """Read settings from ``path``, else from $LAYOUTMETRICS_CONFIG, else defaults."""
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path is None:
        return Settings()
    parser = configparser.ConfigParser()
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)

    kwargs: dict = {}
    if parser.has_section("normalize"):
        kwargs["normalize"] = NormalizationConfig.from_mapping(dict(parser["normalize"]))
    if parser.has_section("match"):
        sec = parser["match"]
        kwargs["match"] = MatchConfig(
            threshold=sec.getfloat("threshold", MatchConfig.threshold),
            category_must_agree=_parse_bool(sec.get("category_must_agree", "true")),
        )
    if parser.has_section("reward") and "weights" in parser["reward"]:
        kwargs["weights"] = RewardWeights.parse(parser["reward"]["weights"])
    if parser.has_section("mining") and "range" in parser["mining"]:
        kwargs["mining"] = MiningConfig.parse(parser["mining"]["range"])
    if parser.has_section("evaluate"):
        kwargs["workers"] = parser["evaluate"].getint("workers", 1)
    return Settings(**kwargs)
