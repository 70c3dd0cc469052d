import numpy as np
import pytest

from rlncs.roi_policy import (ActionId, action_direct, action_learned, complement,
                              roi_from_state, state_from_roi)


class TestDirect:
    def test_empty(self):
        assert action_direct(set()) == set()

    def test_identity(self):
        assert action_direct({3, 7}) == {3, 7}

    def test_idempotent(self):
        r = {1, 4, 9}
        assert action_direct(action_direct(r)) == action_direct(r)

    def test_returns_copy(self):
        r = {1, 2}
        out = action_direct(r)
        out.add(5)
        assert r == {1, 2}


class TestLearned:
    def test_hand_trace(self):
        # member 0 drops below the retention bound, non-member 1 clears the
        # inclusion bound, non-member 2 does not
        got = action_learned({0}, {1, 2}, np.array([0.05, 0.9, 0.5]), 0.8, 0.1)
        assert got == {1}

    def test_all_confident(self):
        n = 6
        r, i = {0, 1}, {2, 3, 4, 5}
        assert action_learned(r, i, np.ones(n), 0.8, 0.1) == set(range(n))

    def test_no_confidence(self):
        assert action_learned({0, 1}, {2, 3}, np.zeros(4), 0.8, 0.1) == set()

    def test_threshold_ordering_enforced(self):
        with pytest.raises(ValueError):
            action_learned({0}, {1}, np.array([0.5, 0.5]), 0.1, 0.8)

    def test_ties_include(self):
        out = action_learned({0}, {1}, np.array([0.1, 0.8]), 0.8, 0.1)
        assert out == {0, 1}

    def test_monotone_in_thresholds(self, np_rng):
        for _ in range(50):
            n = 12
            r = set(np.flatnonzero(np_rng.random(n) < 0.4).tolist())
            i = set(range(n)) - r
            o = np_rng.random(n)
            wide = action_learned(r, i, o, 0.6, 0.05)
            narrow = action_learned(r, i, o, 0.8, 0.2)
            assert narrow <= wide

    def test_retention_dominance(self, np_rng):
        for _ in range(50):
            n = 10
            r = set(np.flatnonzero(np_rng.random(n) < 0.5).tolist())
            i = set(range(n)) - r
            o = np_rng.random(n)
            out = action_learned(r, i, o, 0.8, 0.1)
            for j in range(n):
                if o[j] >= 0.8:
                    assert j in out
                if o[j] < 0.1:
                    assert j not in out


class TestStateEncoding:
    def test_empty(self):
        assert np.array_equal(state_from_roi(set(), 4), np.zeros(4))

    def test_full(self):
        assert np.array_equal(state_from_roi(set(range(4)), 4), np.ones(4))

    def test_reference_pattern(self):
        assert np.array_equal(state_from_roi({1, 4}, 5), [0, 1, 0, 0, 1])

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            state_from_roi({5}, 5)

    def test_bijection(self, np_rng):
        for _ in range(30):
            r = set(np.flatnonzero(np_rng.random(16) < 0.3).tolist())
            assert roi_from_state(state_from_roi(r, 16)) == r

    def test_complement(self):
        assert complement({0, 2}, 4) == {1, 3}
        assert complement(set(), 3) == {0, 1, 2}


def test_action_enum():
    assert int(ActionId.DIRECT) == 0
    assert int(ActionId.LEARNED) == 1
    assert len(list(ActionId)) == 2
