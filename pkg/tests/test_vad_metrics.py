import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_force_roc, mcc_closed_form, rank_sum_u
from subnyquist.errors import DegenerateLabels, InvalidParameter, LengthMismatch
from subnyquist.vad_metrics import (
    ConfusionCounts,
    ScoredFrames,
    auc,
    confusion,
    mcc,
    rasterize_segments,
    roc,
)


def random_frames(rng, n=20, levels=5):
    scores = rng.integers(0, levels, n) / (levels - 1)
    labels = rng.integers(0, 2, n)
    labels[0], labels[1] = 0, 1
    return ScoredFrames(scores, labels)


class TestConfusion:
    def test_simple(self):
        c = confusion(ScoredFrames([0.9, 0.1], [1, 0]), 0.5)
        assert c == ConfusionCounts(tp=1, fp=0, tn=1, fn=0)

    def test_threshold_zero_all_positive(self):
        frames = ScoredFrames([0.0, 0.3, 1.0, 0.2], [0, 1, 1, 0])
        c = confusion(frames, 0.0)
        assert (c.tp, c.fp, c.tn, c.fn) == (2, 2, 0, 0)

    def test_threshold_above_max_all_negative(self):
        frames = ScoredFrames([0.1, 0.3, 0.6], [0, 1, 1])
        c = confusion(frames, 0.61)
        assert (c.tp, c.fp) == (0, 0) and c.total == 3

    def test_ge_rule(self):
        assert confusion(ScoredFrames([0.5], [1]), 0.5).tp == 1

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            ScoredFrames([0.1, 0.2], [1])

    def test_bad_threshold(self):
        with pytest.raises(InvalidParameter):
            confusion(ScoredFrames([0.1], [1]), 1.5)


class TestRoc:
    def test_perfect_separation(self):
        curve = roc(ScoredFrames([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]))
        assert (0.0, 1.0) in curve.points
        assert auc(curve) == 1.0

    def test_all_equal_scores(self):
        curve = roc(ScoredFrames([0.4] * 6, [1, 0, 1, 0, 0, 1]))
        assert curve.points == [(0.0, 0.0), (1.0, 1.0)]
        assert auc(curve) == 0.5

    def test_matches_brute_force(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            frames = random_frames(rng)
            curve = roc(frames)
            np.testing.assert_allclose(curve.points, brute_force_roc(frames.scores, frames.labels))

    def test_degenerate(self):
        with pytest.raises(DegenerateLabels):
            roc(ScoredFrames([0.1, 0.2], [1, 1]))

    def test_label_flip(self):
        rng = np.random.default_rng(1)
        frames = random_frames(rng, 40)
        flipped = ScoredFrames(frames.scores, 1 - frames.labels)
        assert auc(roc(flipped)) == pytest.approx(1 - auc(roc(frames)), abs=1e-12)


class TestMcc:
    def test_perfect(self):
        assert mcc(ConfusionCounts(tp=50, tn=50)) == 1.0

    def test_all_predicted_positive(self):
        assert mcc(ConfusionCounts(tp=30, fp=20)) == 0.0

    def test_spot_value(self):
        value = mcc(ConfusionCounts(tp=40, fp=10, tn=45, fn=5))
        assert value == pytest.approx(1750 / 2487.4686, abs=1e-4)
        assert value == pytest.approx(mcc_closed_form(40, 10, 45, 5), abs=1e-15)
        assert value == pytest.approx(0.7035, abs=1e-4)

    def test_label_and_prediction_swap(self):
        c = ConfusionCounts(tp=12, fp=7, tn=30, fn=4)
        assert mcc(ConfusionCounts(tp=c.tn, fp=c.fn, tn=c.tp, fn=c.fp)) == pytest.approx(mcc(c))

    def test_prediction_flip_negates(self):
        c = ConfusionCounts(tp=12, fp=7, tn=30, fn=4)
        assert mcc(ConfusionCounts(tp=c.fn, fp=c.tn, tn=c.fp, fn=c.tp)) == pytest.approx(-mcc(c))


class TestRasterize:
    def test_centre_rule(self):
        labels = rasterize_segments([(0.015, 0.035)], 5, 100.0)
        # centres 0.005, 0.015, 0.025, 0.035, 0.045
        assert labels.tolist() == [0, 1, 1, 0, 0]

    def test_overlapping_segments(self):
        labels = rasterize_segments([(0.0, 0.02), (0.01, 0.03)], 4, 100.0)
        assert labels.tolist() == [1, 1, 1, 0]


scored = st.integers(2, 60).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 6).map(lambda k: k / 6), min_size=n, max_size=n),
    st.lists(st.integers(0, 1), min_size=n, max_size=n),
))


@settings(max_examples=200, deadline=None)
@given(scored)
def test_auc_equals_normalised_u(data):
    scores, labels = map(np.asarray, data)
    if labels.min() == labels.max():
        return
    frames = ScoredFrames(scores, labels)
    curve = roc(frames)
    u = rank_sum_u(scores[labels == 1], scores[labels == 0])
    assert auc(curve) * frames.n_pos * frames.n_neg == pytest.approx(u, abs=1e-9)
    assert np.all(np.diff(curve.fpr) >= 0) and np.all(np.diff(curve.tpr) >= 0)
    assert curve.points[0] == (0.0, 0.0) and curve.points[-1] == (1.0, 1.0)
    assert 0.0 <= auc(curve) <= 1.0


@settings(max_examples=50, deadline=None)
@given(scored)
def test_auc_invariant_under_monotone_transform(data):
    scores, labels = map(np.asarray, data)
    if labels.min() == labels.max():
        return
    a = auc(roc(ScoredFrames(scores, labels)))
    b = auc(roc(ScoredFrames(np.exp(3 * scores) / 30, labels)))
    assert a == pytest.approx(b, abs=1e-12)
