"""Evaluation metrics, layout-centric reward and hard-sample mining for document parsing."""

__version__ = "0.1.0"

from .errors import InvalidGroundTruth, MalformedHtml, MalformedTable, MissingPageId
from .matching import MatchAssignment, MatchConfig, match_blocks
from .normalize import NormalizationConfig, normalize_latex, normalize_table_html, normalize_text
from .ordermetrics import inversion_count, order_permutation, read_order_edit
from .report import BenchmarkReport, PageScores, emit_report, overall_edit, score_page
from .reward import (
    MiningConfig,
    RewardBreakdown,
    RewardWeights,
    bbox_reward,
    compute_reward,
    mine_hard_samples,
    order_reward,
    text_reward,
)
from .schema import BBox, Block, BlockCategory, Language, PageDocument, parse_page, serialize_page, validate
from .tablemetrics import TableTree, parse_table_tree, table_edit, teds, tree_edit_distance
from .textmetrics import category_edit, global_text_edit, levenshtein, ned

__all__ = [
    "BBox", "BenchmarkReport", "Block", "BlockCategory", "InvalidGroundTruth", "Language",
    "MalformedHtml", "MalformedTable", "MatchAssignment", "MatchConfig", "MiningConfig",
    "MissingPageId", "NormalizationConfig", "PageDocument", "PageScores", "RewardBreakdown",
    "RewardWeights", "TableTree", "bbox_reward", "category_edit", "compute_reward", "emit_report",
    "global_text_edit", "inversion_count", "levenshtein", "match_blocks", "mine_hard_samples",
    "ned", "normalize_latex", "normalize_table_html", "normalize_text", "order_permutation",
    "order_reward", "overall_edit", "parse_page", "parse_table_tree", "read_order_edit",
    "score_page", "serialize_page", "table_edit", "teds", "text_reward", "tree_edit_distance",
    "validate",
]
