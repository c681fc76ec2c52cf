import itertools

import pytest
from hypothesis import given, strategies as st

from gfreval.core import AttributeSet, Distribution, MembershipTable, Qrels, Scale
from gfreval.evaluate import evaluate_runs
from gfreval.harness import (
    REVCNT,
    STANCE,
    SynthConfig,
    gen_synthetic,
    intents_from_labels,
    oracle_gf,
    parse_corpus,
    rerank_by_attribute,
    revcnt_group,
    run_from_lists,
    unique_entity_filter,
)
from gfreval.io import scores_to_matrix
from gfreval.measures import GfConfig, gf
from gfreval.user_model import rbp_decay_sequence

SMALL = SynthConfig(topics=5, runs=3, pool=12, depth=8, seed=1)


class TestSynthetic:
    def test_deterministic(self):
        assert gen_synthetic(SMALL).texts() == gen_synthetic(SMALL).texts()

    def test_seed_changes_output(self):
        other = SynthConfig(topics=5, runs=3, pool=12, depth=8, seed=2)
        assert gen_synthetic(SMALL).texts() != gen_synthetic(other).texts()

    def test_hard_memberships_one_hot(self):
        corpus = gen_synthetic(SMALL)
        for dist in corpus.membership.entries.values():
            assert sorted(dist.probs)[-1] == 1.0

    def test_soft_memberships(self):
        corpus = gen_synthetic(SynthConfig(topics=5, runs=2, pool=12, depth=8, hardness="soft"))
        stance = [d for (_, s), d in corpus.membership.entries.items() if s == "stance"]
        assert any(0.0 < d.probs[0] < 1.0 for d in stance)

    def test_zero_reviews_zero_rating(self):
        corpus = gen_synthetic(SMALL)
        for info in corpus.items.values():
            if info.reviews == 0:
                assert info.rating == 0.0
            else:
                assert 1.0 <= info.rating <= 5.0

    def test_parsers_accept_output(self):
        corpus = gen_synthetic(SMALL)
        back = parse_corpus(corpus.texts())
        assert back.qrels == corpus.qrels
        assert back.membership == corpus.membership
        assert [r.tag for r in back.runs] == [r.tag for r in corpus.runs]

    def test_matrix_shape(self):
        corpus = gen_synthetic(SynthConfig(topics=100, runs=18, pool=12, depth=10))
        cfg = GfConfig({"stance": "jsd", "revcnt": "rnod"})
        scores = evaluate_runs(corpus.runs, cfg, corpus.attrsets, corpus.membership, corpus.targets, corpus.qrels)
        assert scores_to_matrix(scores, "GFR").scores.shape == (100, 18)

    def test_write(self, tmp_path):
        written = gen_synthetic(SMALL).write(tmp_path)
        assert (tmp_path / "runs" / "run00.run").exists()
        assert len(written) == 5 + SMALL.runs

    def test_bad_config(self):
        with pytest.raises(ValueError):
            SynthConfig(hardness="medium")
        with pytest.raises(ValueError):
            SynthConfig(pool=5, depth=10)


@pytest.mark.parametrize("reviews,group", [(0, "g1"), (1, "g2"), (10, "g2"), (11, "g3"), (100, "g3"), (101, "g4")])
def test_revcnt_group(reviews, group):
    assert revcnt_group(reviews) == group


SETS = [
    AttributeSet("b2", ("a", "b")),
    AttributeSet("o3", ("x", "y", "z"), Scale.ORDINAL),
]


class TestOracle:
    def test_empty_decay(self):
        assert oracle_gf([[1, 0], [0, 1]], [0, 0], [0.5, 0.5], "jsd") == 0.0

    def test_perfect(self):
        decay = rbp_decay_sequence(4)
        assert oracle_gf([[0.5, 0.5]] * 4, decay, [0.5, 0.5], "nmd") == pytest.approx(decay.sum(), abs=1e-15)

    @given(
        st.sampled_from(SETS),
        st.data(),
        st.sampled_from(["jsd", "nmd", "rnod"]),
    )
    def test_random_matches_gf(self, aset, data, kind):
        n = len(aset)
        k = data.draw(st.integers(1, 12))
        vec = st.lists(st.integers(0, 9), min_size=n, max_size=n).filter(any).map(lambda v: [x / sum(v) for x in v])
        mems = [Distribution(aset, v) for v in data.draw(st.lists(vec, min_size=k, max_size=k))]
        target = Distribution(aset, data.draw(vec))
        decay = rbp_decay_sequence(k)
        expected = oracle_gf([m.probs for m in mems], decay, target.probs, kind)
        assert abs(gf(mems, decay, target, kind) - expected) <= 1e-12


class TestFilters:
    def test_first_occurrence(self):
        assert unique_entity_filter(["1", "2", "3"], {"1": "x", "2": "x", "3": "y"}, 20) == ["1", "3"]

    def test_distinct(self):
        owners = {d: d for d in "abc"}
        assert unique_entity_filter(list("abc"), owners, 20) == list("abc")

    def test_empty(self):
        assert unique_entity_filter([], {}, 20) == []

    def test_cutoff(self):
        owners = {d: d for d in "abcd"}
        assert unique_entity_filter(list("abcd"), owners, 2) == ["a", "b"]

    @given(st.lists(st.integers(0, 5), max_size=15))
    def test_idempotent(self, owner_ids):
        items = [f"d{i}" for i in range(len(owner_ids))]
        owner = {d: str(o) for d, o in zip(items, owner_ids)}
        once = unique_entity_filter(items, owner, 10)
        assert unique_entity_filter(once, owner, 10) == once


class TestRerank:
    def test_sort(self):
        assert rerank_by_attribute(["1", "2", "3"], {"1": 1, "2": 5, "3": 3}, 20) == ["2", "3", "1"]

    def test_stable(self):
        assert rerank_by_attribute(["b", "a", "c"], {"a": 1, "b": 1, "c": 1}, 20) == ["b", "a", "c"]

    def test_singleton(self):
        assert rerank_by_attribute(["b", "a"], {"a": 9, "b": 1}, 1) == ["b"]

    @given(st.lists(st.floats(0, 5), max_size=25), st.integers(1, 25))
    def test_permutation_of_prefix(self, scores, k):
        items = [f"d{i}" for i in range(len(scores))]
        out = rerank_by_attribute(items, dict(zip(items, scores)), k)
        assert sorted(out) == sorted(items[:k])


def test_run_from_lists():
    run = run_from_lists("x", {"1": ["c", "a", "b"]})
    assert run.items("1") == ["c", "a", "b"]


def test_intents_from_labels():
    qrels = Qrels({"1": {"a": 2, "b": 1, "c": 0, "u": 3}})
    table = MembershipTable({("a", "stance"): STANCE.one_hot("PRO"), ("b", "stance"): STANCE.one_hot("CON"),
                             ("c", "stance"): STANCE.one_hot("PRO")})
    intents = intents_from_labels(qrels, table, STANCE)
    ti = intents["1"]
    assert ti.probs == {"PRO": 0.5, "CON": 0.5}
    assert ti.gain("a", "PRO") == 3.0 and ti.gain("a", "CON") == 0.0
    assert ti.gain("u", "PRO") == 0.0
    assert set(ti.gains) == {"a", "b", "c", "u"}


def test_exhaustive_small_grid():
    count = 0
    for aset in [AttributeSet("b2", ("a", "b")), AttributeSet("o3", ("x", "y", "z"), Scale.ORDINAL)]:
        hards = [aset.one_hot(v) for v in aset.values]
        targets = [aset.one_hot(v) for v in aset.values] + [aset.uniform()]
        for length in range(1, 5):
            decay = rbp_decay_sequence(length)
            for mems in itertools.product(hards, repeat=length):
                for target, kind in itertools.product(targets, ["jsd", "nmd", "rnod"]):
                    expected = oracle_gf([m.probs for m in mems], decay, target.probs, kind)
                    assert abs(gf(list(mems), decay, target, kind) - expected) <= 1e-12
                    count += 1
    assert count > 0
    assert REVCNT.supports_order
