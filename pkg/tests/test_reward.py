from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from helpers import page, text
from layoutmetrics.errors import InvalidGroundTruth
from layoutmetrics.matching import match_blocks
from layoutmetrics.reward import (
    MiningConfig,
    RewardWeights,
    bbox_reward,
    combine,
    compute_reward,
    mine_hard_samples,
    mining_audit,
    order_reward,
    page_reward,
    text_reward,
)
from layoutmetrics.schema import serialize_page
from layoutmetrics.textmetrics import global_text_edit
from oracles import dp_ned, pair_inversions
from synthetic import synthetic_page


def html(*blocks):
    return serialize_page(page(*blocks))


def test_weights_validation():
    assert RewardWeights.parse("1,0,0") == RewardWeights(1.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        RewardWeights(0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        RewardWeights(1.5, -0.5, 0.0)
    with pytest.raises(ValueError):
        RewardWeights.parse("0.5,0.5")


def test_mining_config_validation():
    assert MiningConfig.parse("0.2,0.9") == MiningConfig(0.2, 0.9)
    with pytest.raises(ValueError):
        MiningConfig(0.9, 0.1)


def test_text_reward_examples():
    gt = page(text("sitting"))
    assert text_reward(gt, gt) == 1.0
    assert text_reward(page(text("xyz")), page(text("abc"))) == 0.0
    assert dp_ned("kitten", "sitting") == pytest.approx(3 / 7)
    assert text_reward(page(text("kitten")), gt) == pytest.approx(4 / 7)


def test_bbox_reward_examples():
    gt = page(text("alpha", (0, 0, 2, 2)))
    assert bbox_reward(match_blocks(gt, gt), gt, gt) == 1.0
    pred = page(text("alpha", (1, 0, 3, 2)))
    assert bbox_reward(match_blocks(pred, gt), pred, gt) == pytest.approx(1 / 3)
    far = page(text("alpha", (5, 5, 6, 6)))
    assert bbox_reward(match_blocks(far, gt), far, gt) == 0.0
    assert bbox_reward(match_blocks(page(), page()), page(), page()) == 1.0


def test_bbox_reward_dilution_and_missing_boxes():
    gt = page(text("alpha", (0, 0, 2, 2)))
    pred = page(text("alpha", (0, 0, 2, 2)), text("zzzzzzz", (4, 4, 5, 5)))
    assert bbox_reward(match_blocks(pred, gt), pred, gt) == 0.5
    nobox = page(text("alpha"))
    assert bbox_reward(match_blocks(nobox, gt), nobox, gt) == 0.0


def _ordered(order, n=3):
    gt = page(*(text(f"paragraph {i}") for i in range(n)))
    pred = page(*(gt.blocks[i] for i in order))
    return match_blocks(pred, gt), pred, gt


def test_order_reward_examples():
    assert order_reward(*_ordered([0, 1, 2])) == 1.0
    assert order_reward(*_ordered([2, 1, 0])) == 0.0
    assert pair_inversions([2, 0, 1]) == 2
    assert order_reward(*_ordered([2, 0, 1])) == pytest.approx(1 / 3)
    assert order_reward(*_ordered([0], 1)) == 1.0


def test_combine_example():
    # independently computed components, then exact arithmetic for the total
    r = combine(4 / 7, 1 / 3, 1 / 3, RewardWeights())
    expected = (Fraction(4, 7) + Fraction(1, 3) + Fraction(1, 3)) / 3
    assert expected == Fraction(26, 63)
    assert r.total == pytest.approx(float(expected), abs=1e-12)


def test_compute_reward_end_to_end_components():
    gt = page(text("sitting", (0, 0, 2, 2)))
    pred = page(text("kitten", (1, 0, 3, 2)))
    r = compute_reward(serialize_page(pred), serialize_page(gt))
    assert r.r_text == pytest.approx(4 / 7)
    assert r.r_bbox == pytest.approx(1 / 3)
    assert r.r_order == 1.0
    assert r.total == pytest.approx((4 / 7 + 1 / 3 + 1) / 3)


def test_compute_reward_identity(mixed_page):
    s = serialize_page(mixed_page)
    r = compute_reward(s, s)
    assert (r.r_text, r.r_bbox, r.r_order, r.total) == (1.0, 1.0, 1.0, 1.0)
    assert set(r.to_dict()) == {"r_text", "r_bbox", "r_order", "total"}


def test_unparseable_prediction_scores_zero():
    r = compute_reward('<div data-page-id="p"><p>open', html(text("a")))
    assert (r.r_text, r.r_bbox, r.r_order, r.total) == (0.0, 0.0, 0.0, 0.0)


def test_empty_prediction_scores_zero():
    assert page_reward(page(), page(text("a", (0, 0, 1, 1)))).total == 0.0


def test_invalid_ground_truth():
    with pytest.raises(InvalidGroundTruth):
        compute_reward(html(text("a")), "<p>unclosed")


def test_weight_degeneracy_is_bitwise():
    gt = page(text("sitting words here", (0, 0, 2, 2)), text("second", (0, 3, 2, 4)))
    pred = page(text("second", (0, 3, 2, 4)), text("kitten words", (1, 0, 3, 2)))
    r = compute_reward(serialize_page(pred), serialize_page(gt), RewardWeights(1.0, 0.0, 0.0))
    assert r.total == r.r_text == text_reward(pred, gt)


@given(st.text("abcd", max_size=10), st.text("abcd", max_size=10), st.text("abcd", min_size=1, max_size=10))
def test_ranking_matches_negative_ned(a, b, g):
    gt = page(text(g))
    ra, rb = text_reward(page(text(a)), gt), text_reward(page(text(b)), gt)
    na, nb = -global_text_edit(page(text(a)), gt), -global_text_edit(page(text(b)), gt)
    assert (ra > rb) == (na > nb) and (ra == rb) == (na == nb)


@given(st.permutations(list(range(6))), st.integers(0, 4))
def test_adjacent_transposition_changes_order_reward(order, i):
    order = list(order)
    before = order_reward(*_ordered(order, 6))
    swapped = order[:]
    swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
    after = order_reward(*_ordered(swapped, 6))
    assert abs(before - after) == pytest.approx(1 / 15)
    if order[i] < order[i + 1]:
        assert after < before


def test_synthetic_pages_reward_laws():
    for seed in range(10):
        gt = synthetic_page(seed)
        s = serialize_page(gt)
        r = compute_reward(s, s)
        assert r.total == 1.0
        assert 0.0 <= r.r_bbox <= 1.0


# --- mining -------------------------------------------------------------------


def _record(sample_id, k, n=10):
    gt = "a" * n
    pred = "b" * k + "a" * (n - k)
    return sample_id, html(text(pred)), html(text(gt))


def test_mining_examples():
    records = [_record("hi", 6), _record("lo", 3), _record("edge", 5)]
    audit = list(mining_audit(records))
    assert [(r.sample_id, r.ned, r.selected) for r in audit] == [
        ("hi", 0.6, True), ("lo", 0.3, False), ("edge", 0.5, True)
    ]
    assert mine_hard_samples(records) == ["hi", "edge"]


def test_mining_skips_bad_ground_truth(caplog):
    records = [("bad", html(text("a")), "<p>x"), _record("ok", 7)]
    assert mine_hard_samples(records) == ["ok"]
    assert "bad" in caplog.text


def test_mining_unparseable_prediction_is_ned_one():
    r = next(mining_audit([("x", "<p>oops", html(text("abc")))]))
    assert r.ned == 1.0 and not r.selected
