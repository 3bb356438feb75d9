import pytest
from hypothesis import given, strategies as st

from helpers import page
from layoutmetrics.errors import MalformedHtml, MissingPageId
from layoutmetrics.schema import (
    BBox,
    Block,
    BlockCategory,
    Language,
    PageDocument,
    Violation,
    parse_page,
    read_manifest,
    serialize_page,
    validate,
)


def test_single_block_field_mapping():
    doc = parse_page('<div data-category="text" data-bbox="0,0,100,20">Hello</div>')
    assert doc.blocks == (Block(BlockCategory.TEXT, "Hello", BBox(0, 0, 100, 20)),)


def test_empty_input_has_no_blocks():
    assert parse_page("").blocks == ()


def test_order_preserved():
    doc = parse_page(
        '<div data-page-id="x" data-language="ZH">'
        '<div data-category="formula">x^2</div>'
        '<div data-category="table"><table><tr><td>a</td></tr></table></div>'
        "</div>"
    )
    assert [b.category for b in doc.blocks] == [BlockCategory.FORMULA, BlockCategory.TABLE]
    assert doc.page_id == "x"
    assert doc.language is Language.ZH


def test_unknown_category_and_missing_bbox():
    doc = parse_page('<p data-category="sidebar">aside</p><section>no category</section>')
    assert [b.category for b in doc.blocks] == [BlockCategory.OTHER, BlockCategory.OTHER]
    assert all(b.bbox is None for b in doc.blocks)


def test_table_content_kept_verbatim():
    raw = '<table class="t">\n <tr><td colspan="2">a &amp; b</td></tr>\n</table>'
    doc = parse_page(f'<div data-category="table">{raw}</div>')
    assert doc.blocks[0].content == raw


def test_text_content_drops_inline_tags_and_decodes_entities():
    doc = parse_page('<div data-category="text">a <b>bold</b> &lt;x&gt;<br>next</div>')
    assert doc.blocks[0].content == "a bold <x>\nnext"


def test_nested_same_tag_does_not_end_block_early():
    doc = parse_page('<div data-category="text">a<div>b</div>c</div><div data-category="title">t</div>')
    assert [b.content for b in doc.blocks] == ["abc", "t"]


def test_void_element_block():
    doc = parse_page('<img data-category="image" data-bbox="1,2,3,4"><div data-category="text">x</div>')
    assert doc.blocks[0] == Block(BlockCategory.IMAGE, "", BBox(1, 2, 3, 4))


@pytest.mark.parametrize("bad", [
    '<div data-category="text">never closed',
    '</div><div data-category="text">x</div>',
    '<div data-page-id="p"><div data-category="text">x</div>',
])
def test_malformed_top_level(bad):
    with pytest.raises(MalformedHtml):
        parse_page(bad)


def test_missing_page_id():
    with pytest.raises(MissingPageId):
        parse_page('<div data-category="text">x</div>', require_id=True)
    assert parse_page('<div data-category="text">x</div>', page_id="fallback", require_id=True).page_id == "fallback"


def test_serialize_empty_and_single():
    empty = serialize_page(PageDocument("p0"))
    assert "data-category" not in empty and 'data-page-id="p0"' in empty
    one = serialize_page(page(Block(BlockCategory.TEXT, "hi")))
    assert one.count("data-category") == 1
    assert parse_page(empty) == PageDocument("p0")


def test_validate():
    assert validate(page(Block(BlockCategory.TEXT, "x", BBox(0, 0, 1, 1)))) == []
    assert validate(page(Block(BlockCategory.TEXT, "x", BBox(10, 0, 5, 0)))) == [Violation(0, "x1 > x2")]
    assert validate(page(Block(BlockCategory.TEXT, "x", BBox(-1, 0, 5, 0)))) == [Violation(0, "negative coordinate")]
    assert validate(page(Block(BlockCategory.TABLE, "<td>a"))) == [Violation(0, "malformed table fragment")]
    assert validate(page(Block(BlockCategory.IMAGE, ""))) == []
    assert validate(page(Block(BlockCategory.TEXT, ""))) == [Violation(0, "empty content")]


def test_manifest(tmp_path):
    path = tmp_path / "m.jsonl"
    path.write_text('{"page_id": "a", "language": "ZH", "doc_category": "slides"}\n\n{"page_id": "b"}\n')
    entries = read_manifest(path)
    assert [(e.page_id, e.language, e.doc_category) for e in entries] == [
        ("a", Language.ZH, "slides"), ("b", Language.EN, ""),
    ]
    path.write_text('{"page_id": "a"}\n{"oops": 1}\n')
    with pytest.raises(ValueError, match=":2:"):
        read_manifest(path)


# --- properties -------------------------------------------------------------

coords = st.one_of(st.integers(0, 5000), st.floats(0, 5000, allow_nan=False).map(lambda f: round(f, 3)))
bboxes = st.one_of(st.none(), st.builds(BBox, coords, coords, coords, coords))
plain_text = st.text(st.characters(blacklist_categories=("Cs",)), min_size=1)
cells = st.text("abc 12&<>", max_size=5).map(
    lambda s: s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
)
tables = st.lists(st.lists(cells, min_size=1, max_size=3), max_size=3).map(
    lambda rows: "<table>" + "".join("<tr>" + "".join(f"<td>{c}</td>" for c in r) + "</tr>" for r in rows) + "</table>"
)
non_table = st.sampled_from([c for c in BlockCategory if c not in (BlockCategory.TABLE, BlockCategory.IMAGE)])
blocks = st.one_of(
    st.builds(Block, non_table, plain_text, bboxes),
    st.builds(Block, st.just(BlockCategory.TABLE), tables, bboxes),
    st.builds(Block, st.just(BlockCategory.IMAGE), st.just(""), bboxes),
)
docs = st.builds(
    PageDocument,
    st.text(min_size=1, max_size=10),
    st.sampled_from(list(Language)),
    st.text(max_size=10),
    st.lists(blocks, max_size=6).map(tuple),
)


@given(docs)
def test_round_trip(doc):
    assert parse_page(serialize_page(doc)) == doc


@given(docs)
def test_block_count_equals_top_level_elements(doc):
    html = serialize_page(doc)
    parsed = parse_page(html)
    assert len(parsed.blocks) == len(doc.blocks)
    assert [b.category for b in parsed.blocks] == [b.category for b in doc.blocks]
