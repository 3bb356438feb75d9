import random
import warnings

import pytest
from hypothesis import given, settings, strategies as st

from layoutmetrics.errors import MalformedTable
from layoutmetrics.tablemetrics import parse_table_tree, table_edit, teds, tree_edit_distance
from oracles import node, oracle_ted
from synthetic import random_tree

ROW2 = "<table><tr><td>ab</td><td>x</td></tr></table>"
ROW2_CHANGED = "<table><tr><td>ad</td><td>x</td></tr></table>"


def test_parse_examples():
    t = parse_table_tree("<table><tr><td>a</td></tr></table>")
    assert t.size() == 3
    assert (t.label, t.children[0].label, t.children[0].children[0].label) == ("table", "tr", "cell")
    assert t.children[0].children[0].text == "a"
    assert parse_table_tree("<table></table>").size() == 1
    cell = parse_table_tree('<table><tr><td colspan="2">a</td></tr></table>').children[0].children[0]
    assert (cell.colspan, cell.rowspan) == (2, 1)


def test_row_groups_flattened():
    grouped = parse_table_tree("<table><thead><tr><th>h</th></tr></thead><tbody><tr><td>b</td></tr></tbody></table>")
    flat = parse_table_tree("<table><tr><td>h</td></tr><tr><td>b</td></tr></table>")
    assert tree_edit_distance(grouped, flat) == 0.0


def test_cell_text_normalized():
    t = parse_table_tree("<table><tr><td> a <b>b</b>\n c</td></tr></table>")
    assert t.children[0].children[0].text == "a b c"


def test_parse_rejects_malformed():
    with pytest.raises(MalformedTable):
        parse_table_tree("<td>a")


def test_ted_examples():
    t = parse_table_tree(ROW2)
    assert tree_edit_distance(t, t) == 0.0
    plus = parse_table_tree("<table><tr><td>ab</td><td>x</td><td></td></tr></table>")
    assert tree_edit_distance(t, plus) == 1.0
    assert tree_edit_distance(t, parse_table_tree(ROW2_CHANGED)) == 0.5


def test_ted_derived_value_against_oracle():
    a = node("table", children=[node("tr", children=[node("cell", "ab"), node("cell", "x")])])
    b = node("table", children=[node("tr", children=[node("cell", "ad"), node("cell", "x")])])
    assert oracle_ted(a, b) == 0.5


def test_span_mismatch_costs_full_relabel():
    a = parse_table_tree('<table><tr><td colspan="2">a</td></tr></table>')
    b = parse_table_tree("<table><tr><td>a</td></tr></table>")
    assert tree_edit_distance(a, b) == 1.0


def test_teds_examples():
    assert teds(ROW2, ROW2) == 1.0
    assert teds("<td>a", ROW2) == 0.0
    assert teds(ROW2_CHANGED, ROW2) == 0.875


def test_teds_ground_truth_errors():
    with pytest.raises(MalformedTable):
        teds(ROW2, "<td>broken")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        assert teds("<td>a", "<td>b") == 0.0
    assert any("malformed" in str(w.message) for w in caught)


def test_table_edit_examples():
    assert table_edit(ROW2, ROW2) == 0.0
    assert table_edit("", ROW2) == 1.0
    styled = '<TABLE><tr style="color:red"><TD class="c">ab</TD><td>x</td></tr></TABLE>'
    assert table_edit(styled, ROW2) == 0.0


# --- oracle agreement -----------------------------------------------------------

def test_zhang_shasha_matches_oracle_small_trees():
    rng = random.Random(20240917)
    for _ in range(300):
        a, oa = random_tree(rng, 6)
        b, ob = random_tree(rng, 6)
        assert tree_edit_distance(a, b) == pytest.approx(oracle_ted(oa, ob), abs=1e-9)


@st.composite
def table_pair_html(draw):
    def one():
        rows = draw(st.lists(st.lists(st.tuples(st.text("ab", max_size=3), st.integers(1, 2)),
                                      min_size=1, max_size=3), max_size=3))
        return "<table>" + "".join(
            "<tr>" + "".join(f'<td colspan="{c}">{t}</td>' for t, c in r) + "</tr>" for r in rows
        ) + "</table>"
    return one(), one(), one()


@settings(max_examples=60, deadline=None)
@given(table_pair_html())
def test_ted_metric_properties(case):
    a, b, c = (parse_table_tree(h) for h in case)
    ab, ba = tree_edit_distance(a, b), tree_edit_distance(b, a)
    assert ab == pytest.approx(ba, abs=1e-9)
    assert tree_edit_distance(a, a) == 0.0
    assert tree_edit_distance(a, c) <= ab + tree_edit_distance(b, c) + 1e-9
    assert 0.0 <= teds(case[0], case[1]) <= 1.0
    assert teds(case[0], case[1]) == pytest.approx(teds(case[1], case[0]), abs=1e-12)
