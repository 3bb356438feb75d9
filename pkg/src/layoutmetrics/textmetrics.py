"""Edit-distance primitives and the page-level text metrics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Hashable, Sequence

from .errors import MalformedTable
from .normalize import (
    DEFAULT_CONFIG,
    NormalizationConfig,
    normalize_latex,
    normalize_table_html,
    normalize_text,
    normalize_whitespace,
)
from .schema import Block, BlockCategory, PageDocument

if TYPE_CHECKING:
    from .matching import MatchAssignment

GLOBAL_TEXT_JOINER = " "


def levenshtein(a: Sequence[Hashable], b: Sequence[Hashable]) -> int:
    """Unit-cost edit distance between two sequences (codepoints for str).

    Bit-parallel over Python integers (Hyyrö's formulation of Myers), so the
    cost is O(len(b)) big-int operations of len(a) bits each.
    """
    if a == b:
        return 0
    # common prefix/suffix never contribute to the distance
    lo = 0
    n = min(len(a), len(b))
    while lo < n and a[lo] == b[lo]:
        lo += 1
    hi_a, hi_b = len(a), len(b)
    while hi_a > lo and hi_b > lo and a[hi_a - 1] == b[hi_b - 1]:
        hi_a -= 1
        hi_b -= 1
    a, b = a[lo:hi_a], b[lo:hi_b]
    if len(a) > len(b):
        a, b = b, a
    m = len(a)
    if m == 0:
        return len(b)

    peq: dict = {}
    bit = 1
    for ch in a:
        peq[ch] = peq.get(ch, 0) | bit
        bit <<= 1
    mask = (1 << m) - 1
    top = 1 << (m - 1)
    pv, mv, score = mask, 0, m
    for ch in b:
        eq = peq.get(ch, 0)
        xv = eq | mv
        xh = (((eq & pv) + pv) ^ pv) | eq
        ph = mv | ~(xh | pv)
        mh = pv & xh
        if ph & top:
            score += 1
        elif mh & top:
            score -= 1
        ph = ((ph << 1) | 1) & mask
        mh = (mh << 1) & mask
        pv = (mh | ~(xv | ph)) & mask
        mv = ph & xv
    return score


@dataclass(frozen=True)
class NedScore:
    distance: int
    max_len: int

    @property
    def ned(self) -> float:
        return self.distance / self.max_len if self.max_len else 0.0


def ned_score(a: Sequence[Hashable], b: Sequence[Hashable]) -> NedScore:
    return NedScore(levenshtein(a, b), max(len(a), len(b)))


def ned(a: Sequence[Hashable], b: Sequence[Hashable]) -> float:
    """Levenshtein distance over the longer length; 0.0 for two empty inputs."""
    return ned_score(a, b).ned


def normalize_block(block: Block, cfg: NormalizationConfig = DEFAULT_CONFIG) -> str:
    """Normalized comparison string for a block, by category."""
    cat = block.category
    if cat is BlockCategory.FORMULA:
        return normalize_latex(block.content, cfg)
    if cat is BlockCategory.CHEMISTRY:
        return normalize_whitespace(block.content, cfg)
    if cat is BlockCategory.TABLE:
        try:
            return normalize_table_html(block.content, cfg)
        except MalformedTable:
            return normalize_whitespace(block.content, cfg)
    return normalize_text(block.content, cfg)


def global_text(doc: PageDocument, cfg: NormalizationConfig = DEFAULT_CONFIG) -> str:
    parts = []
    for block in doc.blocks:
        if block.category.text_like and not block.category.excluded_from_global_text:
            s = normalize_text(block.content, cfg)
            if s:
                parts.append(s)
    return GLOBAL_TEXT_JOINER.join(parts)


def global_text_edit(pred: PageDocument, gt: PageDocument, cfg: NormalizationConfig = DEFAULT_CONFIG) -> float:
    return ned(global_text(pred, cfg), global_text(gt, cfg))


def category_edit(
    pred: PageDocument,
    gt: PageDocument,
    category: BlockCategory,
    match: "MatchAssignment",
    cfg: NormalizationConfig = DEFAULT_CONFIG,
) -> float:
    """Mean block NED over matched pairs of one category; each miss scores 1.0."""
    pred_idx = set(pred.indices(category))
    gt_idx = set(gt.indices(category))
    if not pred_idx and not gt_idx:
        return 0.0
    if not pred_idx or not gt_idx:
        return 1.0
    scores = []
    for p, g, _ in match.pairs:
        if p in pred_idx and g in gt_idx:
            scores.append(ned(normalize_block(pred.blocks[p], cfg), normalize_block(gt.blocks[g], cfg)))
            pred_idx.discard(p)
            gt_idx.discard(g)
    scores.extend([1.0] * (len(pred_idx) + len(gt_idx)))
    return sum(scores) / len(scores)
