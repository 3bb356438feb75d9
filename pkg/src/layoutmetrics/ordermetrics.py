"""Reading-order scoring over matched blocks."""

from __future__ import annotations

from typing import Sequence

from .matching import MatchAssignment
from .schema import PageDocument
from .textmetrics import ned


def included_pairs(match: MatchAssignment, gt: PageDocument) -> list[tuple[int, int]]:
    """(pred_index, gt_index) pairs that take part in reading order, in GT order."""
    return sorted(
        ((p, g) for p, g, _ in match.pairs if not gt.blocks[g].category.excluded_from_reading_order),
        key=lambda pg: pg[1],
    )


def order_permutation(match: MatchAssignment, pred: PageDocument, gt: PageDocument) -> list[int]:
    """For each included pair in GT order, the rank of its predicted block."""
    pairs = included_pairs(match, gt)
    by_pred = sorted(range(len(pairs)), key=lambda k: pairs[k][0])
    rank = [0] * len(pairs)
    for r, k in enumerate(by_pred):
        rank[k] = r
    return rank


def inversion_count(perm: Sequence[int]) -> int:
    """Number of pairs i < j with perm[i] > perm[j], by merge sort."""
    items = list(perm)
    buf = [0] * len(items)
    count = 0
    width = 1
    n = len(items)
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if items[i] <= items[j]:
                    buf[k] = items[i]
                    i += 1
                else:
                    buf[k] = items[j]
                    count += mid - i
                    j += 1
                k += 1
            buf[k:k + mid - i] = items[i:mid]
            k += mid - i
            buf[k:k + hi - j] = items[j:hi]
        items, buf = buf, items
        width *= 2
    return count


def read_order_edit(match: MatchAssignment, pred: PageDocument, gt: PageDocument) -> float:
    """NED between the included pair ids in GT order and in predicted order."""
    perm = order_permutation(match, pred, gt)
    if len(perm) <= 1:
        return 0.0
    in_pred_order = sorted(range(len(perm)), key=perm.__getitem__)
    return ned(list(range(len(perm))), in_pred_order)
