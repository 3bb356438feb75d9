"""Content normalization applied before any string comparison.

Whitespace, Unicode compatibility forms, fullwidth ASCII, presentation-only
LaTeX macros and cosmetic table attributes are removed so that metrics score
what a model recognised rather than how it formatted it.
"""

from __future__ import annotations

import html
import re
import unicodedata
from dataclasses import dataclass, field, replace
from functools import lru_cache
from html.parser import HTMLParser
from typing import Mapping, Union

from .errors import MalformedTable

DEFAULT_LATEX_STRIP = (
    "displaystyle", "mathrm", "textstyle", "left", "right",
    ",", ";", "!", "quad", "qquad",
)
DEFAULT_TABLE_DROP_ATTRS = ("style", "class", "width", "height", "align")
STRUCTURAL_ATTRS = frozenset({"rowspan", "colspan"})


@dataclass(frozen=True)
class NormalizationConfig:
    collapse_whitespace: bool = True
    unicode_compat_fold: bool = True
    fullwidth_to_halfwidth: bool = True
    latex_strip_list: tuple[str, ...] = DEFAULT_LATEX_STRIP
    table_drop_attrs: tuple[str, ...] = DEFAULT_TABLE_DROP_ATTRS
    enabled: bool = True

    def __post_init__(self):
        object.__setattr__(self, "latex_strip_list", tuple(m.lstrip("\\") for m in self.latex_strip_list))
        drop = tuple(a.lower() for a in self.table_drop_attrs if a.lower() not in STRUCTURAL_ATTRS)
        object.__setattr__(self, "table_drop_attrs", drop)

    @classmethod
    def from_mapping(cls, values: Mapping[str, str]) -> "NormalizationConfig":
        """Build from string key/values (a config-file section)."""
        kwargs: dict = {}
        for key in ("collapse_whitespace", "unicode_compat_fold", "fullwidth_to_halfwidth", "enabled"):
            if key in values:
                kwargs[key] = _parse_bool(values[key])
        for key in ("latex_strip_list", "table_drop_attrs"):
            if key in values:
                kwargs[key] = tuple(v.strip() for v in str(values[key]).split(",") if v.strip())
        unknown = set(values) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown normalization keys: {sorted(unknown)}")
        return cls(**kwargs)

    def disabled(self) -> "NormalizationConfig":
        return replace(self, enabled=False)


def _parse_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    s = str(value).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


DEFAULT_CONFIG = NormalizationConfig()


# --- text -------------------------------------------------------------------


@lru_cache(maxsize=8192)
def _compat_char(ch: str) -> str:
    # one-to-one NFKC only; multi-codepoint expansions (ligatures, fractions)
    # are kept so normalization never lengthens a string
    mapped = unicodedata.normalize("NFKC", ch)
    return mapped if len(mapped) == 1 else ch


def _fold(s: str, cfg: NormalizationConfig) -> str:
    if cfg.unicode_compat_fold and not s.isascii():
        s = "".join(map(_compat_char, s))
    if cfg.fullwidth_to_halfwidth and not s.isascii():
        s = s.translate(_FULLWIDTH)
    return s


_FULLWIDTH = {cp: cp - 0xFEE0 for cp in range(0xFF01, 0xFF5F)}
_FULLWIDTH[0x3000] = 0x20

_WS = re.compile(r"\s+")


def normalize_text(s: str, cfg: NormalizationConfig = DEFAULT_CONFIG) -> str:
    if not cfg.enabled:
        return s
    s = _fold(s, cfg)
    if cfg.collapse_whitespace:
        s = " ".join(s.split())
    return s


def normalize_whitespace(s: str, cfg: NormalizationConfig = DEFAULT_CONFIG) -> str:
    """Whitespace collapse only (no Unicode folding), used for SMILES."""
    if not cfg.enabled or not cfg.collapse_whitespace:
        return s
    return " ".join(s.split())


# --- LaTeX ------------------------------------------------------------------

_LATEX_TOKEN = re.compile(r"\\(?:[A-Za-z]+|.)|\\|[{}]|\s+|[^\\{}\s]+", re.S)
_CONTROL_WORD = re.compile(r"\\[A-Za-z]+\Z")


def _latex_tokens(s: str) -> list[str]:
    return _LATEX_TOKEN.findall(s)


def _matching_brace(tokens: list[str], open_at: int) -> int | None:
    depth = 0
    for k in range(open_at, len(tokens)):
        if tokens[k] == "{":
            depth += 1
        elif tokens[k] == "}":
            depth -= 1
            if depth == 0:
                return k
    return None


def _strip_macros(tokens: list[str], names: frozenset[str]) -> list[str]:
    out: list[str] = []
    dropped_close: set[int] = set()
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if i in dropped_close:
            i += 1
            continue
        if tok.startswith("\\") and tok[1:] in names:
            i += 1
            if tok[1:].isalpha():
                k = i
                while k < len(tokens) and tokens[k].isspace():
                    k += 1
                if k < len(tokens) and tokens[k] == "{":
                    close = _matching_brace(tokens, k)
                    if close is not None:
                        dropped_close.add(close)
                        i = k + 1
            continue
        out.append(tok)
        i += 1
    return out


def _join_latex(tokens: list[str]) -> str:
    parts: list[str] = []
    for tok in tokens:
        # keep "\alpha x" from fusing into the unknown control word "\alphax"
        if parts and tok[:1].isalpha() and _CONTROL_WORD.search(parts[-1]):
            parts.append(" ")
        parts.append(tok)
    return "".join(parts)


def _collapse_latex_ws(tokens: list[str]) -> list[str]:
    out: list[str] = []
    for tok in tokens:
        if tok.isspace():
            if out and out[-1] != " ":
                out.append(" ")
            continue
        if len(tok) == 2 and tok[0] == "\\" and tok[1].isspace():
            tok = "\\ "
        out.append(tok)
    while out and out[-1] == " ":
        out.pop()
    return out


def normalize_latex(s: str, cfg: NormalizationConfig = DEFAULT_CONFIG) -> str:
    """Drop presentation macros (keeping their argument text) and collapse whitespace.

    >>> normalize_latex("\\\\mathrm{d}x \\\\, dy")
    'dx dy'
    """
    if not cfg.enabled:
        return s
    s = _fold(s, cfg)
    names = frozenset(cfg.latex_strip_list)
    prev = None
    while s != prev:
        prev = s
        s = _join_latex(_strip_macros(_latex_tokens(s), names))
    if cfg.collapse_whitespace:
        s = _join_latex(_collapse_latex_ws(_latex_tokens(s.lstrip())))
    return s


# --- table HTML -------------------------------------------------------------

_VOID_TAGS = frozenset(
    "area base br col embed hr img input link meta param source track wbr".split()
)
_ROW_GROUPS = frozenset({"thead", "tbody", "tfoot"})
_CELLS = frozenset({"td", "th"})
_TABLE_CHILDREN = _ROW_GROUPS | {"tr", "caption", "colgroup", "col"}


@dataclass
class Element:
    tag: str
    attrs: list[tuple[str, str]] = field(default_factory=list)
    children: list[Union["Element", str]] = field(default_factory=list)

    def attr(self, name: str, default: str | None = None) -> str | None:
        for k, v in self.attrs:
            if k == name:
                return v
        return default

    def text(self) -> str:
        return "".join(c if isinstance(c, str) else c.text() for c in self.children)


class _TreeBuilder(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.root = Element("#fragment")
        self.stack = [self.root]

    def handle_starttag(self, tag, attrs):
        el = Element(tag, [(k, v if v is not None else "") for k, v in attrs])
        self.stack[-1].children.append(el)
        if tag not in _VOID_TAGS:
            self.stack.append(el)

    def handle_startendtag(self, tag, attrs):
        el = Element(tag, [(k, v if v is not None else "") for k, v in attrs])
        self.stack[-1].children.append(el)

    def handle_endtag(self, tag):
        if tag in _VOID_TAGS:
            return
        if len(self.stack) < 2 or self.stack[-1].tag != tag:
            raise MalformedTable(f"unbalanced </{tag}>")
        self.stack.pop()

    def handle_data(self, data):
        self.stack[-1].children.append(data)


def _check_structure(el: Element) -> None:
    for child in el.children:
        if isinstance(child, str):
            if child.strip():
                raise MalformedTable(f"stray text inside <{el.tag}>")
            continue
        tag = child.tag
        if el.tag == "table":
            ok = tag in _TABLE_CHILDREN
        elif el.tag in _ROW_GROUPS:
            ok = tag == "tr"
        elif el.tag == "tr":
            ok = tag in _CELLS
        else:
            ok = True
        if not ok:
            raise MalformedTable(f"<{tag}> not allowed inside <{el.tag}>")
        if tag in ("tr",) or tag in _ROW_GROUPS:
            _check_structure(child)


def parse_table_fragment(s: str) -> Element:
    """Parse a table fragment into an element tree rooted at ``<table>``.

    Tags must be explicitly closed and properly nested; rows must sit in the
    table (directly or in a row group) and cells in rows.
    """
    builder = _TreeBuilder()
    builder.feed(s)
    builder.close()
    if len(builder.stack) != 1:
        raise MalformedTable(f"<{builder.stack[-1].tag}> is never closed")
    tops = [c for c in builder.root.children if not (isinstance(c, str) and not c.strip())]
    if len(tops) != 1 or isinstance(tops[0], str) or tops[0].tag != "table":
        raise MalformedTable("fragment must consist of exactly one <table> element")
    table = tops[0]
    _check_structure(table)
    return table


def _normalize_children(el: Element, cfg: NormalizationConfig, structural: bool) -> None:
    kids: list[Union[Element, str]] = []
    for child in el.children:
        if isinstance(child, str):
            child = _fold(child, cfg)
            if cfg.collapse_whitespace:
                child = _WS.sub(" ", child)
                if structural and child == " ":
                    continue
            if child:
                kids.append(child)
        else:
            child.attrs = sorted((k, v) for k, v in child.attrs if k not in cfg.table_drop_attrs)
            _normalize_children(child, cfg, child.tag == "table" or child.tag in _ROW_GROUPS or child.tag == "tr")
            kids.append(child)
    if cfg.collapse_whitespace:
        if kids and isinstance(kids[0], str):
            kids[0] = kids[0].lstrip()
        if kids and isinstance(kids[-1], str):
            kids[-1] = kids[-1].rstrip()
        kids = [k for k in kids if not (isinstance(k, str) and not k)]
    el.children = kids


def _render(el: Element, out: list[str]) -> None:
    attrs = "".join(f' {k}="{html.escape(v)}"' for k, v in el.attrs)
    out.append(f"<{el.tag}{attrs}>")
    if el.tag in _VOID_TAGS:
        return
    for child in el.children:
        if isinstance(child, str):
            out.append(html.escape(child, quote=False))
        else:
            _render(child, out)
    out.append(f"</{el.tag}>")


def normalized_table_tree(s: str, cfg: NormalizationConfig = DEFAULT_CONFIG) -> Element:
    table = parse_table_fragment(s)
    if cfg.enabled:
        table.attrs = sorted((k, v) for k, v in table.attrs if k not in cfg.table_drop_attrs)
        _normalize_children(table, cfg, structural=True)
    return table


def normalize_table_html(s: str, cfg: NormalizationConfig = DEFAULT_CONFIG) -> str:
    if not cfg.enabled:
        return s
    out: list[str] = []
    _render(normalized_table_tree(s, cfg), out)
    return "".join(out)
