"""Content-based optimal assignment between predicted and ground-truth blocks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .normalize import DEFAULT_CONFIG, NormalizationConfig
from .schema import BlockCategory, PageDocument
from .textmetrics import levenshtein, normalize_block

# similarities are scaled to integers so the solver works in exact arithmetic
_SCALE_BITS = 53

_TEXT_CLASS = frozenset({BlockCategory.TEXT, BlockCategory.TITLE, BlockCategory.CAPTION})


@dataclass(frozen=True)
class MatchConfig:
    threshold: float = 0.4
    category_must_agree: bool = True

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"match threshold must be in [0, 1], got {self.threshold}")


@dataclass(frozen=True)
class MatchAssignment:
    pairs: tuple[tuple[int, int, float], ...] = ()  # (pred_index, gt_index, similarity)
    unmatched_pred: tuple[int, ...] = ()
    unmatched_gt: tuple[int, ...] = ()

    @property
    def total_similarity(self) -> float:
        return sum(s for _, _, s in self.pairs)

    def gt_to_pred(self) -> dict[int, int]:
        return {g: p for p, g, _ in self.pairs}


def _category_class(cat: BlockCategory):
    return "text" if cat in _TEXT_CLASS else cat


def compatible(a: BlockCategory, b: BlockCategory, cfg: MatchConfig) -> bool:
    return not cfg.category_must_agree or _category_class(a) == _category_class(b)


def hungarian_max(weights: Sequence[Sequence[int]]) -> list[int]:
    """Maximum-weight assignment for an n x m integer matrix with n <= m.

    Returns the column chosen for each row. Integer (or Fraction) weights keep
    every comparison exact.
    """
    n = len(weights)
    m = len(weights[0]) if n else 0
    if n > m:
        raise ValueError("hungarian_max needs at least as many columns as rows")
    u = [0] * (n + 1)
    v = [0] * (m + 1)
    p = [0] * (m + 1)
    way = [0] * (m + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv: list = [None] * (m + 1)
        used = [False] * (m + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            row = weights[i0 - 1]
            ui0 = u[i0]
            delta = None
            j1 = 0
            for j in range(1, m + 1):
                if used[j]:
                    continue
                cur = -row[j - 1] - ui0 - v[j]
                if minv[j] is None or cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if delta is None or minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(m + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    cols = [0] * n
    for j in range(1, m + 1):
        if p[j]:
            cols[p[j] - 1] = j - 1
    return cols


def similarity_matrix(
    pred: PageDocument,
    gt: PageDocument,
    cfg: MatchConfig = MatchConfig(),
    norm: NormalizationConfig = DEFAULT_CONFIG,
) -> list[list[tuple[int, int] | None]]:
    """Per (gt, pred) pair, ``(distance, max_len)`` if the pair may match, else None."""
    pred_text = [normalize_block(b, norm) for b in pred.blocks]
    gt_text = [normalize_block(b, norm) for b in gt.blocks]
    out = []
    for g, gb in enumerate(gt.blocks):
        row: list[tuple[int, int] | None] = []
        for p, pb in enumerate(pred.blocks):
            if not compatible(pb.category, gb.category, cfg):
                row.append(None)
                continue
            a, b = pred_text[p], gt_text[g]
            longest = max(len(a), len(b))
            # the length gap alone bounds the similarity from above
            if longest and min(len(a), len(b)) / longest < cfg.threshold:
                row.append(None)
                continue
            d = levenshtein(a, b)
            sim = 1.0 - d / longest if longest else 1.0
            row.append((d, longest) if sim >= cfg.threshold and sim > 0 else None)
        out.append(row)
    return out


def match_blocks(
    pred: PageDocument,
    gt: PageDocument,
    cfg: MatchConfig = MatchConfig(),
    norm: NormalizationConfig = DEFAULT_CONFIG,
) -> MatchAssignment:
    """Maximum total similarity partial matching.

    Similarity is 1 - NED of the normalized contents; only category-compatible
    pairs at or above the threshold (and above zero) can match. Among optimal
    assignments the earliest ground-truth block takes the earliest predicted
    block, then the next ground-truth block, and so on.
    """
    n_gt, n_pred = len(gt.blocks), len(pred.blocks)
    if not n_gt or not n_pred:
        return MatchAssignment((), tuple(range(n_pred)), tuple(range(n_gt)))
    sims = similarity_matrix(pred, gt, cfg, norm)

    base = n_pred + 1
    tie_span = base ** n_gt  # exceeds any achievable sum of tie-break terms
    weights = []
    for g, row in enumerate(sims):
        place = base ** (n_gt - 1 - g)
        w = []
        for p, cell in enumerate(row):
            if cell is None:
                w.append(0)
                continue
            d, longest = cell
            scaled = (((longest - d) << _SCALE_BITS) // longest) if longest else (1 << _SCALE_BITS)
            w.append(scaled * tie_span + (n_pred - p) * place)
        w.extend([0] * n_gt)  # "leave unmatched" columns
        weights.append(w)

    cols = hungarian_max(weights)
    pairs = []
    for g, p in enumerate(cols):
        if p < n_pred and sims[g][p] is not None:
            d, longest = sims[g][p]
            pairs.append((p, g, 1.0 - d / longest if longest else 1.0))
    matched_pred = {p for p, _, _ in pairs}
    matched_gt = {g for _, g, _ in pairs}
    return MatchAssignment(
        pairs=tuple(pairs),
        unmatched_pred=tuple(i for i in range(n_pred) if i not in matched_pred),
        unmatched_gt=tuple(i for i in range(n_gt) if i not in matched_gt),
    )
