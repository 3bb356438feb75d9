"""Layout-centric reward for RL fine-tuning and the hard-sample miner.

The text component is ``1 - NED`` rather than ``-NED``: a constant shift that
keeps every component in [0, 1] and ranks candidates identically, so
group-relative advantages are unchanged.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Iterable, Iterator

from .errors import InvalidGroundTruth, MalformedHtml
from .matching import MatchAssignment, MatchConfig, match_blocks
from .normalize import DEFAULT_CONFIG, NormalizationConfig
from .ordermetrics import inversion_count, order_permutation
from .schema import PageDocument, parse_page
from .textmetrics import global_text_edit

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RewardWeights:
    w_text: float = 1 / 3
    w_bbox: float = 1 / 3
    w_order: float = 1 / 3

    def __post_init__(self):
        ws = (self.w_text, self.w_bbox, self.w_order)
        if min(ws) < 0:
            raise ValueError(f"reward weights must be non-negative, got {ws}")
        if abs(sum(ws) - 1.0) > 1e-9:
            raise ValueError(f"reward weights must sum to 1, got {ws}")

    @classmethod
    def parse(cls, spec: str) -> "RewardWeights":
        """From ``"w_text,w_bbox,w_order"``."""
        parts = [float(x) for x in spec.split(",")]
        if len(parts) != 3:
            raise ValueError(f"expected three comma-separated weights, got {spec!r}")
        return cls(*parts)


@dataclass(frozen=True)
class RewardBreakdown:
    r_text: float
    r_bbox: float
    r_order: float
    total: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class MiningConfig:
    lo: float = 0.5
    hi: float = 0.8

    def __post_init__(self):
        if not 0.0 <= self.lo <= self.hi <= 1.0:
            raise ValueError(f"mining range must satisfy 0 <= lo <= hi <= 1, got [{self.lo}, {self.hi}]")

    @classmethod
    def parse(cls, spec: str) -> "MiningConfig":
        parts = [float(x) for x in spec.split(",")]
        if len(parts) != 2:
            raise ValueError(f"expected 'lo,hi', got {spec!r}")
        return cls(*parts)

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi


def text_reward(pred: PageDocument, gt: PageDocument, cfg: NormalizationConfig = DEFAULT_CONFIG) -> float:
    return 1.0 - global_text_edit(pred, gt, cfg)


def bbox_reward(match: MatchAssignment, pred: PageDocument, gt: PageDocument) -> float:
    """Summed IoU of matched pairs over the larger block count of the two pages."""
    denom = max(len(pred.blocks), len(gt.blocks))
    if denom == 0:
        return 1.0
    total = 0.0
    for p, g, _ in match.pairs:
        a, b = pred.blocks[p].bbox, gt.blocks[g].bbox
        if a is not None and b is not None:
            total += a.iou(b)
    return total / denom


def order_reward(match: MatchAssignment, pred: PageDocument, gt: PageDocument) -> float:
    perm = order_permutation(match, pred, gt)
    n = len(perm)
    if n <= 1:
        return 1.0
    return 1.0 - inversion_count(perm) / (n * (n - 1) / 2)


def combine(r_text: float, r_bbox: float, r_order: float, weights: RewardWeights) -> RewardBreakdown:
    total = weights.w_text * r_text + weights.w_bbox * r_bbox + weights.w_order * r_order
    return RewardBreakdown(r_text, r_bbox, r_order, min(1.0, max(0.0, total)))


ZERO_REWARD = RewardBreakdown(0.0, 0.0, 0.0, 0.0)


def page_reward(
    pred: PageDocument,
    gt: PageDocument,
    weights: RewardWeights = RewardWeights(),
    match_cfg: MatchConfig = MatchConfig(),
    norm: NormalizationConfig = DEFAULT_CONFIG,
) -> RewardBreakdown:
    if not pred.blocks and gt.blocks:
        # an empty output earns nothing, even the vacuous order component
        return ZERO_REWARD
    match = match_blocks(pred, gt, match_cfg, norm)
    return combine(
        text_reward(pred, gt, norm),
        bbox_reward(match, pred, gt),
        order_reward(match, pred, gt),
        weights,
    )


def compute_reward(
    pred_html: str,
    gt_html: str,
    weights: RewardWeights = RewardWeights(),
    match_cfg: MatchConfig = MatchConfig(),
    norm: NormalizationConfig = DEFAULT_CONFIG,
) -> RewardBreakdown:
    try:
        gt = parse_page(gt_html)
    except MalformedHtml as exc:
        raise InvalidGroundTruth(str(exc)) from exc
    try:
        pred = parse_page(pred_html)
    except MalformedHtml:
        return ZERO_REWARD
    return page_reward(pred, gt, weights, match_cfg, norm)


@dataclass(frozen=True)
class MiningResult:
    sample_id: str
    ned: float
    selected: bool


def mining_audit(
    records: Iterable[tuple[str, str, str]],
    cfg: MiningConfig = MiningConfig(),
    norm: NormalizationConfig = DEFAULT_CONFIG,
) -> Iterator[MiningResult]:
    """Global-text NED and selection flag per ``(sample_id, pred_html, gt_html)``.

    Records whose ground truth does not parse are logged and skipped; an
    unparseable prediction counts as NED 1.
    """
    for sample_id, pred_html, gt_html in records:
        try:
            gt = parse_page(gt_html)
        except MalformedHtml as exc:
            log.warning("skipping %s: ground truth does not parse (%s)", sample_id, exc)
            continue
        try:
            pred = parse_page(pred_html)
        except MalformedHtml:
            value = 1.0
        else:
            value = global_text_edit(pred, gt, norm)
        yield MiningResult(sample_id, value, cfg.contains(value))


def mine_hard_samples(
    records: Iterable[tuple[str, str, str]],
    cfg: MiningConfig = MiningConfig(),
    norm: NormalizationConfig = DEFAULT_CONFIG,
) -> list[str]:
    return [r.sample_id for r in mining_audit(records, cfg, norm) if r.selected]
