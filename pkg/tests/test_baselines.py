import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gfreval.baselines import (
    AttentionParams,
    abr,
    d_ndcg,
    dsharp_ndcg,
    ece,
    global_gain,
    intent_recall,
    mean_attention,
    ndcg,
    ndkl,
    skew,
    skew_extremes,
)
from gfreval.core import AttributeSet, Distribution, TopicIntents, exponential_gain
from gfreval.errors import DomainError, UndefinedMeasureError

TWO = AttributeSet("two", ("a", "b"))
THREE = AttributeSet("three", ("x", "y", "z"))


def dist(*p, aset=None):
    return Distribution(aset or (TWO if len(p) == 2 else THREE), p)


class TestSkew:
    def test_zero(self):
        assert skew(dist(0.25, 0.75), dist(0.25, 0.75), "a") == 0.0

    def test_double(self):
        assert skew(dist(0.5, 0.5), dist(0.25, 0.75), "a") == pytest.approx(0.693147, abs=1e-6)

    def test_zero_target(self):
        with pytest.raises(UndefinedMeasureError):
            skew(dist(0.25, 0.75), dist(0.0, 1.0), "a")

    def test_zero_target_smoothed(self):
        assert skew(dist(0.25, 0.75), dist(0.0, 1.0), "a", epsilon=1e-6) == pytest.approx(math.log(0.25e6))

    def test_zero_achieved(self):
        assert skew(dist(0.0, 1.0), dist(0.5, 0.5), "a") == -math.inf

    def test_extremes(self):
        lo, hi = skew_extremes(dist(0.5, 0.5), dist(0.25, 0.75))
        assert lo == pytest.approx(-0.405465, abs=1e-6)
        assert hi == pytest.approx(0.693147, abs=1e-6)
        assert skew_extremes(dist(0.2, 0.8), dist(0.2, 0.8)) == (0.0, 0.0)


class TestNdkl:
    def test_matching(self):
        assert ndkl([TWO.uniform()] * 5, TWO.uniform()) == 0.0

    def test_single_prefix(self):
        assert ndkl([TWO.one_hot("a")], TWO.uniform()) == pytest.approx(math.log(2), abs=1e-12)

    def test_zero_gold_without_smoothing(self):
        with pytest.raises(UndefinedMeasureError):
            ndkl([TWO.one_hot("a")], TWO.one_hot("b"), epsilon=0)

    def test_two_prefix_hand_value(self):
        # prefixes (1, 0) and (0.5, 0.5) against uniform: only the first contributes
        expected = math.log(2) / (1 + 1 / math.log2(3))
        assert ndkl([TWO.one_hot("a"), TWO.one_hot("b")], TWO.uniform()) == pytest.approx(expected, abs=1e-12)

    @given(st.lists(st.sampled_from(["x", "y", "z"]), min_size=1, max_size=10))
    def test_non_negative(self, labels):
        assert ndkl([THREE.one_hot(v) for v in labels], THREE.uniform()) >= 0.0


class TestAttention:
    def test_weights(self):
        np.testing.assert_allclose(AttentionParams().weights(2), (15.0, 12.75))

    def test_bad_p(self):
        with pytest.raises(DomainError):
            AttentionParams(1.0)

    def test_ma_two_ranks(self):
        mems = [TWO.one_hot("a"), TWO.one_hot("a"), TWO.one_hot("b")]
        assert mean_attention(mems, "a") == pytest.approx(13.875, abs=1e-12)

    def test_ma_first_rank(self):
        assert mean_attention([TWO.one_hot("a"), TWO.one_hot("b")], "a", AttentionParams(0.3)) == pytest.approx(30.0)

    def test_ma_absent(self):
        with pytest.raises(UndefinedMeasureError):
            mean_attention([TWO.one_hot("a")], "b")

    def test_abr_balanced(self):
        assert abr([TWO.uniform()] * 3) == 1.0

    def test_abr_absent_value(self):
        assert abr([TWO.one_hot("a")] * 3) == 0.0

    def test_abr_ratio(self):
        # MA(a) = 15 at rank 1; MA(b) = mean of ranks 2 and 3
        p = AttentionParams()
        w = p.weights(3)
        mems = [TWO.one_hot("a"), TWO.one_hot("b"), TWO.one_hot("b")]
        assert abr(mems, p) == pytest.approx(((w[1] + w[2]) / 2) / w[0], abs=1e-12)

    @given(st.lists(st.sampled_from(["x", "y", "z"]), min_size=1, max_size=10))
    def test_abr_relabel_invariant(self, labels):
        rename = {"x": "y", "y": "z", "z": "x"}
        a = abr([THREE.one_hot(v) for v in labels])
        b = abr([THREE.one_hot(rename[v]) for v in labels])
        assert 0.0 <= a <= 1.0
        assert a == b


class TestEce:
    def test_uniform(self):
        np.testing.assert_allclose(ece([TWO.uniform()] * 2), (13.875, 13.875))

    def test_one_hot(self):
        np.testing.assert_allclose(ece([TWO.one_hot("a")]), (15.0, 0.0))

    def test_normalised(self):
        np.testing.assert_allclose(ece([TWO.uniform()] * 2, normalize=True), (0.5, 0.5))

    @settings(max_examples=50)
    @given(st.lists(st.sampled_from(["x", "y", "z"]), min_size=1, max_size=15), st.floats(0.01, 0.99))
    def test_mass_conservation(self, labels, p):
        params = AttentionParams(p)
        raw = ece([THREE.one_hot(v) for v in labels], params)
        assert raw.sum() == pytest.approx(params.weights(len(labels)).sum(), rel=1e-12)


class TestNdcg:
    def test_perfect(self):
        assert ndcg([3, 2, 0], [0, 2, 3], 3) == pytest.approx(1.0)

    def test_swapped_pair(self):
        assert ndcg([0, 1], [1, 0], 2) == pytest.approx(0.63093, abs=1e-5)

    def test_all_zero(self):
        with pytest.raises(UndefinedMeasureError):
            ndcg([0, 0], [0, 0, 0], 2)

    def test_rank_one_discounted(self):
        # every rank is discounted, so rank 1 of a single-item list has weight 1/log2(2) = 1
        assert ndcg([1], [1, 1], 1) == 1.0
        assert ndcg([0, 1], [1, 1], 2) == pytest.approx((1 / math.log2(3)) / (1 + 1 / math.log2(3)))


PROBS = {"i1": 0.5, "i2": 0.5}


class TestDiversity:
    def test_global_gain(self):
        ti = TopicIntents(PROBS, {"d": {"i1": 3.0, "i2": 1.0}})
        assert global_gain("d", ti) == 2.0

    def test_global_gain_single(self):
        ti = TopicIntents({"i": 1.0}, {"d": {"i": 7.0}})
        assert global_gain("d", ti) == 7.0
        assert global_gain("e", ti) == 0.0

    def test_intent_recall(self):
        ti = TopicIntents(
            {f"i{k}": 0.25 for k in range(4)},
            {"d1": {"i0": 1.0}, "d2": {"i1": 2.0}, "d3": {"i2": 1.0}},
        )
        assert intent_recall(["d1", "d2"], ti, 10) == 0.5
        assert intent_recall(["d1", "d2", "d3"], ti, 2) == 0.5
        assert intent_recall([], ti, 10) == 0.0

    def test_full_coverage_ideal(self):
        ti = TopicIntents(PROBS, {"d1": {"i1": 1.0}, "d2": {"i2": 1.0}})
        assert dsharp_ndcg(["d1", "d2"], ti, 10) == pytest.approx(1.0)

    def test_zero_gains(self):
        ti = TopicIntents(PROBS, {"d1": {}})
        with pytest.raises(UndefinedMeasureError):
            dsharp_ndcg(["d1"], ti, 10)


@st.composite
def hard_intent_instance(draw):
    n_intents = draw(st.integers(1, 4))
    intents = [f"i{k}" for k in range(n_intents)]
    n_items = draw(st.integers(1, 12))
    items = [f"d{k}" for k in range(n_items)]
    grades = draw(st.lists(st.integers(0, 3), min_size=n_items, max_size=n_items).filter(any))
    labels = draw(st.lists(st.sampled_from(intents), min_size=n_items, max_size=n_items))
    ranking = draw(st.permutations(items))
    depth = draw(st.integers(1, n_items))
    cutoff = draw(st.integers(1, 10))
    return intents, items, grades, labels, list(ranking[:depth]), cutoff


@settings(max_examples=200)
@given(hard_intent_instance())
def test_d_ndcg_reduces_to_ndcg(inst):
    intents, items, grades, labels, ranking, cutoff = inst
    grade = dict(zip(items, grades))
    gains = {d: {lab: exponential_gain(grade[d])} for d, lab in zip(items, labels)}
    ti = TopicIntents({i: 1 / len(intents) for i in intents}, gains)
    expected = ndcg([grade[d] for d in ranking], grades, cutoff)
    assert abs(d_ndcg(ranking, ti, cutoff) - expected) <= 1e-12
    assert dsharp_ndcg(ranking, ti, cutoff) == pytest.approx(
        (intent_recall(ranking, ti, cutoff) + expected) / 2, abs=1e-12
    )
