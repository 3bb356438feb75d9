"""Table metrics: TEDS over table/row/cell trees and NED over normalized HTML."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from .errors import MalformedTable
from .normalize import (
    DEFAULT_CONFIG,
    Element,
    NormalizationConfig,
    normalize_table_html,
    normalize_text,
    normalize_whitespace,
    normalized_table_tree,
)
from .textmetrics import ned

_ROW_GROUPS = ("thead", "tbody", "tfoot")


@dataclass
class TableTree:
    label: str
    text: str | None = None
    colspan: int = 1
    rowspan: int = 1
    children: list["TableTree"] = field(default_factory=list)

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)


def _span(el: Element, name: str) -> int:
    try:
        return max(1, int(el.attr(name, "1") or "1"))
    except ValueError:
        return 1


def _rows(table: Element):
    for child in table.children:
        if isinstance(child, str):
            continue
        if child.tag == "tr":
            yield child
        elif child.tag in _ROW_GROUPS:
            yield from (r for r in child.children if not isinstance(r, str))


def parse_table_tree(html: str, cfg: NormalizationConfig = DEFAULT_CONFIG) -> TableTree:
    table = normalized_table_tree(html, cfg)
    root = TableTree("table")
    for tr in _rows(table):
        row = TableTree("tr")
        for td in tr.children:
            if isinstance(td, str):
                continue
            row.children.append(
                TableTree("cell", normalize_text(td.text(), cfg), _span(td, "colspan"), _span(td, "rowspan"))
            )
        root.children.append(row)
    return root


def relabel_cost(a: TableTree, b: TableTree) -> float:
    if a.label == "cell" and b.label == "cell":
        if a.colspan != b.colspan or a.rowspan != b.rowspan:
            return 1.0
        return ned(a.text or "", b.text or "")
    return 0.0 if a.label == b.label else 1.0


class _Indexed:
    """Postorder numbering with leftmost-leaf indices and keyroots."""

    def __init__(self, root: TableTree):
        self.nodes: list[TableTree] = []
        self.lml: list[int] = []
        self._walk(root)
        seen = {}
        for i, l in enumerate(self.lml):
            seen[l] = i  # highest postorder index per leftmost leaf
        self.keyroots = sorted(seen.values())

    def _walk(self, node: TableTree) -> int:
        first = None
        for child in node.children:
            leaf = self._walk(child)
            if first is None:
                first = leaf
        idx = len(self.nodes)
        self.nodes.append(node)
        self.lml.append(idx if first is None else first)
        return self.lml[idx]


def tree_edit_distance(t1: TableTree, t2: TableTree) -> float:
    """Zhang-Shasha ordered tree edit distance, unit insert/delete costs."""
    A, B = _Indexed(t1), _Indexed(t2)
    na, nb = len(A.nodes), len(B.nodes)
    td = [[0.0] * nb for _ in range(na)]
    rename: dict[tuple[int, int], float] = {}

    def ren(x: int, y: int) -> float:
        key = (x, y)
        if key not in rename:
            rename[key] = relabel_cost(A.nodes[x], B.nodes[y])
        return rename[key]

    for i in A.keyroots:
        for j in B.keyroots:
            li, lj = A.lml[i], B.lml[j]
            m, n = i - li + 2, j - lj + 2
            ioff, joff = li - 1, lj - 1
            fd = [[0.0] * n for _ in range(m)]
            for x in range(1, m):
                fd[x][0] = fd[x - 1][0] + 1
            for y in range(1, n):
                fd[0][y] = fd[0][y - 1] + 1
            for x in range(1, m):
                ax = x + ioff
                lx = A.lml[ax]
                fx, fx1 = fd[x], fd[x - 1]
                for y in range(1, n):
                    by = y + joff
                    ly = B.lml[by]
                    best = min(fx1[y] + 1, fx[y - 1] + 1)
                    if lx == li and ly == lj:
                        cand = fx1[y - 1] + ren(ax, by)
                        if cand < best:
                            best = cand
                        fx[y] = best
                        td[ax][by] = best
                    else:
                        cand = fd[lx - 1 - ioff][ly - 1 - joff] + td[ax][by]
                        fx[y] = cand if cand < best else best
    return td[na - 1][nb - 1]


def teds(pred_html: str, gt_html: str, cfg: NormalizationConfig = DEFAULT_CONFIG) -> float:
    """Tree-edit-distance similarity in [0, 1].

    An unparseable prediction scores 0. An unparseable ground truth raises
    MalformedTable, unless the prediction is unparseable too (0 with a warning).
    """
    try:
        gt_tree = parse_table_tree(gt_html, cfg)
    except MalformedTable:
        try:
            parse_table_tree(pred_html, cfg)
        except MalformedTable:
            warnings.warn("both tables malformed; TEDS scored 0", RuntimeWarning, stacklevel=2)
            return 0.0
        raise
    try:
        pred_tree = parse_table_tree(pred_html, cfg)
    except MalformedTable:
        return 0.0
    denom = max(pred_tree.size(), gt_tree.size())
    score = 1.0 - tree_edit_distance(pred_tree, gt_tree) / denom
    return min(1.0, max(0.0, score))


def table_string(html: str, cfg: NormalizationConfig = DEFAULT_CONFIG) -> str:
    try:
        return normalize_table_html(html, cfg)
    except MalformedTable:
        return normalize_whitespace(html, cfg)


def table_edit(pred_html: str, gt_html: str, cfg: NormalizationConfig = DEFAULT_CONFIG) -> float:
    return ned(table_string(pred_html, cfg), table_string(gt_html, cfg))
