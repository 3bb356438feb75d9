"""Block-structured HTML page annotations.

One page is a wrapper element carrying ``data-page-id``, ``data-language``
and ``data-doc-category``; each top-level child element is one block with
``data-category`` and an optional ``data-bbox="x1,y1,x2,y2"``::

    <div data-page-id="p1" data-language="EN" data-doc-category="academic">
    <div data-category="title" data-bbox="40,30,560,60">Results</div>
    <div data-category="table"><table><tr><td>a</td></tr></table></div>
    </div>

Table blocks keep their inner markup verbatim. Every other block stores plain
text: inline tags are dropped and character references decoded on parse, and
``<``, ``>``, ``&`` are escaped again on serialize.
"""

from __future__ import annotations

import enum
import html
import json
from dataclasses import dataclass, field
from html.parser import HTMLParser
from pathlib import Path
from typing import Iterable, NamedTuple

from .errors import MalformedHtml, MalformedTable, MissingPageId


class BlockCategory(str, enum.Enum):
    TEXT = "text"
    TITLE = "title"
    FORMULA = "formula"
    TABLE = "table"
    IMAGE = "image"
    CHEMISTRY = "chemistry"
    HANDWRITING = "handwriting"
    HEADER = "header"
    FOOTER = "footer"
    CAPTION = "caption"
    OTHER = "other"

    @classmethod
    def from_name(cls, name: str | None) -> "BlockCategory":
        if not name:
            return cls.OTHER
        key = name.strip().lower()
        try:
            return cls(key)
        except ValueError:
            return _CATEGORY_ALIASES.get(key, cls.OTHER)

    @property
    def excluded_from_global_text(self) -> bool:
        return self in IGNORABLE_CATEGORIES

    @property
    def excluded_from_reading_order(self) -> bool:
        return self in (BlockCategory.TABLE, BlockCategory.IMAGE) or self in IGNORABLE_CATEGORIES

    @property
    def text_like(self) -> bool:
        return self in TEXT_LIKE_CATEGORIES


_CATEGORY_ALIASES = {
    "paragraph": BlockCategory.TEXT,
    "plain_text": BlockCategory.TEXT,
    "heading": BlockCategory.TITLE,
    "equation": BlockCategory.FORMULA,
    "math": BlockCategory.FORMULA,
    "figure": BlockCategory.IMAGE,
    "picture": BlockCategory.IMAGE,
    "chem": BlockCategory.CHEMISTRY,
    "smiles": BlockCategory.CHEMISTRY,
    "hw": BlockCategory.HANDWRITING,
    "page_header": BlockCategory.HEADER,
    "page_footer": BlockCategory.FOOTER,
}

IGNORABLE_CATEGORIES = frozenset({BlockCategory.HEADER, BlockCategory.FOOTER})
TEXT_LIKE_CATEGORIES = frozenset(
    {BlockCategory.TEXT, BlockCategory.TITLE, BlockCategory.CAPTION, BlockCategory.HANDWRITING}
)


class Language(str, enum.Enum):
    EN = "EN"
    ZH = "ZH"

    @classmethod
    def from_name(cls, name: str | None) -> "Language":
        if name and name.strip().lower() in ("zh", "zh-cn", "zh-hans", "zh-tw", "cn", "chinese"):
            return cls.ZH
        return cls.EN


@dataclass(frozen=True)
class BBox:
    x1: float
    y1: float
    x2: float
    y2: float

    @property
    def area(self) -> float:
        return max(0, self.x2 - self.x1) * max(0, self.y2 - self.y1)

    def iou(self, other: "BBox") -> float:
        iw = min(self.x2, other.x2) - max(self.x1, other.x1)
        ih = min(self.y2, other.y2) - max(self.y1, other.y1)
        inter = iw * ih if iw > 0 and ih > 0 else 0
        union = self.area + other.area - inter
        if union <= 0:
            # degenerate boxes: only an exact coincidence counts as overlap
            return 1.0 if self == other else 0.0
        return inter / union

    def to_attr(self) -> str:
        return ",".join(_fmt_coord(v) for v in (self.x1, self.y1, self.x2, self.y2))

    @classmethod
    def from_attr(cls, value: str | None) -> "BBox | None":
        if value is None:
            return None
        parts = value.split(",")
        if len(parts) != 4:
            return None
        try:
            return cls(*(_parse_coord(p) for p in parts))
        except ValueError:
            return None


def _fmt_coord(v: float) -> str:
    return str(v) if isinstance(v, int) else repr(float(v))


def _parse_coord(s: str) -> float:
    s = s.strip()
    try:
        return int(s)
    except ValueError:
        return float(s)


@dataclass(frozen=True)
class Block:
    category: BlockCategory
    content: str = ""
    bbox: BBox | None = None


@dataclass(frozen=True)
class PageDocument:
    page_id: str = ""
    language: Language = Language.EN
    doc_category: str = ""
    blocks: tuple[Block, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not isinstance(self.blocks, tuple):
            object.__setattr__(self, "blocks", tuple(self.blocks))

    def indices(self, *categories: BlockCategory) -> list[int]:
        return [i for i, b in enumerate(self.blocks) if b.category in categories]


class Violation(NamedTuple):
    block_index: int | None
    reason: str


# --- parsing ---------------------------------------------------------------

_VOID_TAGS = frozenset(
    "area base br col embed hr img input link meta param source track wbr".split()
)


class _Event(NamedTuple):
    kind: str  # "start" | "end" | "startend"
    tag: str
    attrs: dict
    begin: int  # offset of "<"
    end: int  # offset just past ">"


class _TagScanner(HTMLParser):
    def __init__(self, source: str):
        super().__init__(convert_charrefs=True)
        self.source = source
        self.events: list[_Event] = []
        self._line_starts = [0]
        for i, ch in enumerate(source):
            if ch == "\n":
                self._line_starts.append(i + 1)

    def _offset(self) -> int:
        line, col = self.getpos()
        return self._line_starts[line - 1] + col

    def handle_starttag(self, tag, attrs):
        begin = self._offset()
        text = self.get_starttag_text() or ""
        kind = "startend" if tag in _VOID_TAGS else "start"
        self.events.append(_Event(kind, tag, dict(attrs), begin, begin + len(text)))

    def handle_startendtag(self, tag, attrs):
        begin = self._offset()
        text = self.get_starttag_text() or ""
        self.events.append(_Event("startend", tag, dict(attrs), begin, begin + len(text)))

    def handle_endtag(self, tag):
        begin = self._offset()
        close = self.source.find(">", begin)
        end = len(self.source) if close < 0 else close + 1
        self.events.append(_Event("end", tag, {}, begin, end))


def _scan(source: str) -> list[_Event]:
    scanner = _TagScanner(source)
    scanner.feed(source)
    scanner.close()
    return scanner.events


def _inner_text(source: str, begin: int, end: int, events: list[_Event]) -> str:
    pieces = []
    pos = begin
    for ev in events:
        pieces.append(source[pos:ev.begin])
        if ev.tag == "br":
            pieces.append("\n")
        pos = ev.end
    pieces.append(source[pos:end])
    return html.unescape("".join(pieces))


def _make_block(source: str, opener: _Event, inner: list[_Event], inner_end: int) -> Block:
    category = BlockCategory.from_name(opener.attrs.get("data-category"))
    bbox = BBox.from_attr(opener.attrs.get("data-bbox"))
    if opener.kind == "startend":
        content = ""
    elif category is BlockCategory.TABLE:
        content = source[opener.end:inner_end]
    else:
        content = _inner_text(source, opener.end, inner_end, inner)
    return Block(category, content, bbox)


def parse_page(html_text: str, page_id: str | None = None, require_id: bool = False) -> PageDocument:
    """Parse one page of block HTML into a :class:`PageDocument`.

    ``page_id`` is used when the markup carries none. With ``require_id``
    a page without any derivable id raises :class:`MissingPageId`.
    """
    events = _scan(html_text)
    meta: dict = {}
    blocks: list[Block] = []
    wrapper: _Event | None = None
    wrapper_closed = False

    i = 0
    n = len(events)
    while i < n:
        ev = events[i]
        if ev.kind == "end":
            if wrapper is not None and not wrapper_closed and ev.tag == wrapper.tag:
                wrapper_closed = True
                i += 1
                continue
            raise MalformedHtml(f"unexpected </{ev.tag}> at offset {ev.begin}")
        if wrapper is None and not blocks and "data-page-id" in ev.attrs and ev.kind == "start":
            wrapper = ev
            meta = ev.attrs
            i += 1
            continue
        if wrapper_closed:
            raise MalformedHtml(f"<{ev.tag}> after the page wrapper at offset {ev.begin}")
        if ev.kind == "startend":
            blocks.append(_make_block(html_text, ev, [], ev.end))
            i += 1
            continue
        # block element: find its matching end tag by counting same-name tags
        depth = 1
        j = i + 1
        while j < n:
            other = events[j]
            if other.tag == ev.tag:
                if other.kind == "start":
                    depth += 1
                elif other.kind == "end":
                    depth -= 1
                    if depth == 0:
                        break
            j += 1
        if j >= n:
            raise MalformedHtml(f"<{ev.tag}> at offset {ev.begin} is never closed")
        blocks.append(_make_block(html_text, ev, events[i + 1:j], events[j].begin))
        i = j + 1

    if wrapper is not None and not wrapper_closed:
        raise MalformedHtml("page wrapper is never closed")

    pid = meta.get("data-page-id") or page_id or ""
    if require_id and not pid:
        raise MissingPageId("page has no data-page-id and none was supplied")
    return PageDocument(
        page_id=pid,
        language=Language.from_name(meta.get("data-language")),
        doc_category=meta.get("data-doc-category") or "",
        blocks=tuple(blocks),
    )


def serialize_page(doc: PageDocument) -> str:
    lines = [
        '<div data-page-id="{}" data-language="{}" data-doc-category="{}">'.format(
            html.escape(doc.page_id), doc.language.value, html.escape(doc.doc_category)
        )
    ]
    for block in doc.blocks:
        attrs = f'data-category="{block.category.value}"'
        if block.bbox is not None:
            attrs += f' data-bbox="{block.bbox.to_attr()}"'
        if block.category is BlockCategory.TABLE:
            body = block.content
        else:
            body = html.escape(block.content, quote=False)
        lines.append(f"<div {attrs}>{body}</div>")
    lines.append("</div>")
    return "\n".join(lines) + "\n"


def validate(doc: PageDocument) -> list[Violation]:
    from .normalize import parse_table_fragment

    out: list[Violation] = []
    if not doc.page_id:
        out.append(Violation(None, "empty page_id"))
    for i, block in enumerate(doc.blocks):
        box = block.bbox
        if box is not None:
            if box.x1 > box.x2:
                out.append(Violation(i, "x1 > x2"))
            if box.y1 > box.y2:
                out.append(Violation(i, "y1 > y2"))
            if min(box.x1, box.y1, box.x2, box.y2) < 0:
                out.append(Violation(i, "negative coordinate"))
        if not block.content and block.category is not BlockCategory.IMAGE:
            out.append(Violation(i, "empty content"))
        if block.category is BlockCategory.TABLE and block.content:
            try:
                parse_table_fragment(block.content)
            except MalformedTable:
                out.append(Violation(i, "malformed table fragment"))
    return out


# --- corpus layout ----------------------------------------------------------


@dataclass(frozen=True)
class ManifestEntry:
    page_id: str
    language: Language
    doc_category: str


def read_manifest(path: str | Path) -> list[ManifestEntry]:
    """Read a JSON-lines manifest; raises ValueError naming the bad line."""
    entries = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                pid = rec["page_id"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: invalid manifest record ({exc})") from None
            if not isinstance(pid, str) or not pid:
                raise ValueError(f"{path}:{lineno}: page_id must be a non-empty string")
            if pid in seen:
                raise ValueError(f"{path}:{lineno}: duplicate page_id {pid!r}")
            seen.add(pid)
            entries.append(
                ManifestEntry(pid, Language.from_name(rec.get("language")), str(rec.get("doc_category") or ""))
            )
    return entries


def write_manifest(path: str | Path, entries: Iterable[ManifestEntry]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in entries:
            fh.write(json.dumps({"page_id": e.page_id, "language": e.language.value,
                                 "doc_category": e.doc_category}, ensure_ascii=False) + "\n")


def page_path(directory: str | Path, page_id: str) -> Path:
    return Path(directory) / f"{page_id}.html"
