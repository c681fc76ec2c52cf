import numpy as np
import pytest
from hypothesis import given, strategies as st

from gfreval.errors import DomainError
from gfreval.user_model import (
    DecayKind,
    UtilityKind,
    cascade_decay,
    decay_sequence,
    err_decay_sequence,
    rbp_decay_sequence,
    rel_prob,
    utility,
    utility_sequence,
)

grades = st.lists(st.integers(0, 6), min_size=1, max_size=30)


@pytest.mark.parametrize("g,p", [(0, 0.0), (1, 0.5), (2, 0.75), (3, 0.875)])
def test_rel_prob(g, p):
    assert rel_prob(g) == p


def test_rel_prob_capped():
    assert rel_prob(100) == rel_prob(15)
    assert rel_prob(15) < 1.0


def test_rel_prob_negative():
    with pytest.raises(DomainError):
        rel_prob(-1)


class TestErrDecay:
    def test_hand_example(self):
        np.testing.assert_allclose(err_decay_sequence([2, 1, 0]), (0.75, 0.125, 0.0), atol=1e-15)

    def test_nothing_relevant(self):
        assert err_decay_sequence([0, 0, 0]).tolist() == [0.0, 0.0, 0.0]

    def test_stop_limit(self):
        d = err_decay_sequence([15, 3, 3])
        assert d[0] == pytest.approx(1.0, abs=1e-4)
        assert d[1:].sum() < 1e-4

    def test_empty(self):
        with pytest.raises(DomainError):
            err_decay_sequence([])

    @given(grades)
    def test_bounds(self, gs):
        d = err_decay_sequence(gs)
        assert np.all(d >= 0)
        cum = np.cumsum(d)
        assert np.all(np.diff(cum) >= 0)
        assert cum[-1] <= 1.0 + 1e-12


class TestRbpDecay:
    def test_first_term(self):
        assert rbp_decay_sequence(1).tolist() == pytest.approx([0.15])

    def test_sum_ten(self):
        assert rbp_decay_sequence(10, 0.85).sum() == pytest.approx(0.803126, abs=1e-6)
        assert rbp_decay_sequence(10, 0.85).sum() == pytest.approx(1 - 0.85**10, abs=1e-15)

    def test_half(self):
        assert rbp_decay_sequence(2, 0.5).tolist() == [0.5, 0.25]

    @pytest.mark.parametrize("phi", [0.0, 1.0, -0.2, 1.5])
    def test_bad_phi(self, phi):
        with pytest.raises(DomainError):
            rbp_decay_sequence(3, phi)

    @pytest.mark.parametrize("k", [1, 2, 10, 57, 100])
    def test_equals_constant_cascade(self, k):
        np.testing.assert_allclose(cascade_decay([0.15] * k), rbp_decay_sequence(k, 0.85), rtol=0, atol=1e-12)


class TestDecaySequence:
    def test_err_needs_grades(self):
        with pytest.raises(DomainError):
            decay_sequence(DecayKind.ERR, 3)

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            decay_sequence("err", 3, [1, 1])

    def test_rbp_ignores_grades(self):
        assert decay_sequence("rbp", 3, [5, 0, 0]).tolist() == rbp_decay_sequence(3).tolist()


class TestUtility:
    def test_err(self):
        assert utility(UtilityKind.ERR, 1) == 1.0
        assert utility("err", 4) == 0.25

    def test_irbu(self):
        assert utility("irbu", 2) == pytest.approx(0.9801, abs=1e-15)

    def test_rank_zero(self):
        with pytest.raises(DomainError):
            utility("err", 0)

    def test_sequence(self):
        np.testing.assert_allclose(utility_sequence("err", 3), (1.0, 0.5, 1 / 3))

    def test_labels(self):
        assert UtilityKind.ERR.label == "ERR"
        assert UtilityKind.IRBU.label == "iRBU"
