"""Fusion strategies, tie handling, the weight sweep, and selection counts."""

import math

import pytest
from hypothesis import given, strategies as st

from moodfuse.circumplex import ClassDistribution
from moodfuse.errors import (
    EmptyDataset,
    MixedLabelSets,
    TieError,
    WeightOutOfRange,
)
from moodfuse.fusion import (
    FusionConfig,
    FusionRecord,
    fuse,
    fuse_average,
    fuse_max,
    fuse_weighted,
    selection_proportions,
    sweep_weights,
)

from oracles import oracle_sweep

BIN = ("negative", "positive")


def dist(*probs, labels=None):
    labels = labels or tuple(f"c{i}" for i in range(len(probs)))
    return ClassDistribution(labels, probs)


def pair_strategy(n_classes):
    weights = st.lists(
        st.floats(min_value=1e-3, max_value=1.0),
        min_size=n_classes,
        max_size=n_classes,
    )
    labels = tuple(f"c{i}" for i in range(n_classes))
    return st.tuples(weights, weights).map(
        lambda wt: (
            ClassDistribution.from_weights(labels, wt[0]),
            ClassDistribution.from_weights(labels, wt[1]),
        )
    )


class TestFuseMax:
    def test_audio_more_confident(self):
        out = fuse_max(dist(0.9, 0.1), dist(0.6, 0.4))
        assert out.label == "c0"
        assert out.chosen_modality == "audio"
        assert out.fused_dist is None

    def test_text_more_confident(self):
        out = fuse_max(dist(0.55, 0.45), dist(0.3, 0.7))
        assert out.label == "c1"
        assert out.chosen_modality == "text"

    def test_tie_prefers_text_by_default(self):
        out = fuse_max(dist(0.6, 0.4), dist(0.4, 0.6))
        assert out.label == "c1"
        assert out.chosen_modality == "text"

    def test_tie_prefer_audio(self):
        out = fuse_max(dist(0.6, 0.4), dist(0.4, 0.6), tie_break="prefer-audio")
        assert out.label == "c0"
        assert out.chosen_modality == "audio"

    def test_tie_error_mode(self):
        with pytest.raises(TieError):
            fuse_max(dist(0.6, 0.4), dist(0.4, 0.6), tie_break="error")

    def test_mixed_label_sets(self):
        with pytest.raises(MixedLabelSets):
            fuse_max(dist(0.5, 0.5), dist(0.5, 0.5, labels=("x", "y")))

    def test_label_order_reconciled(self):
        audio = dist(0.9, 0.1, labels=("neg", "pos"))
        text = dist(0.95, 0.05, labels=("pos", "neg"))
        out = fuse_max(audio, text)
        assert out.chosen_modality == "text"
        assert out.label == "pos"


class TestFuseAverageAndWeighted:
    def test_average_hand_mean(self):
        out = fuse_average(dist(0.8, 0.2), dist(0.4, 0.6))
        assert out.fused_dist.probs == pytest.approx((0.6, 0.4), abs=1e-12)
        assert out.label == "c0"
        assert out.chosen_modality == "combined"

    def test_average_symmetric_tie_goes_to_text_argmax(self):
        out = fuse_average(dist(0.9, 0.1), dist(0.1, 0.9))
        assert out.fused_dist.probs == (0.5, 0.5)
        assert out.label == "c1"

    def test_average_tie_error_mode(self):
        with pytest.raises(TieError):
            fuse_average(dist(0.9, 0.1), dist(0.1, 0.9), tie_break="error")

    def test_average_idempotent_on_identical_inputs(self):
        d = dist(0.3, 0.45, 0.25)
        out = fuse_average(d, d)
        assert out.fused_dist == d

    def test_weighted_hand_arithmetic(self):
        out = fuse_weighted(dist(0.8, 0.2), dist(0.3, 0.7), 0.6)
        # 0.6 * 0.8 + 0.4 * 0.3 = 0.60
        assert out.fused_dist.probs == pytest.approx((0.6, 0.4), abs=1e-12)
        assert out.label == "c0"

    def test_weight_out_of_range(self):
        for bad in (-0.1, 1.1, float("nan")):
            with pytest.raises(WeightOutOfRange):
                fuse_weighted(dist(0.5, 0.5), dist(0.5, 0.5), bad)

    def test_config_dispatch(self):
        audio, text = dist(0.8, 0.2), dist(0.3, 0.7)
        assert fuse(audio, text, FusionConfig("max")).chosen_modality == "audio"
        assert fuse(audio, text, FusionConfig("average")).label == "c0"
        weighted = fuse(audio, text, FusionConfig("weighted", audio_weight=0.0))
        assert weighted.label == "c1"

    def test_config_validation(self):
        with pytest.raises(ValueError):
            FusionConfig("weighted")
        with pytest.raises(ValueError):
            FusionConfig("average", audio_weight=0.5)
        with pytest.raises(ValueError):
            FusionConfig("max", tie_break="flip-coin")

    @given(pair=pair_strategy(4))
    def test_endpoint_identities(self, pair):
        audio, text = pair
        assert fuse_weighted(audio, text, 1.0).label == audio.argmax_label()
        assert fuse_weighted(audio, text, 0.0).label == text.argmax_label()

    @given(pair=pair_strategy(3), w=st.floats(min_value=0.0, max_value=1.0))
    def test_weighted_output_is_normalized(self, pair, w):
        out = fuse_weighted(*pair, w)
        assert math.isclose(math.fsum(out.fused_dist.probs), 1.0, abs_tol=1e-9)

    @given(pair=pair_strategy(2))
    def test_half_weight_equals_average_bitwise(self, pair):
        audio, text = pair
        half = fuse_weighted(audio, text, 0.5)
        avg = fuse_average(audio, text)
        assert half.fused_dist.probs == avg.fused_dist.probs
        assert half.label == avg.label

    @given(
        weights=st.tuples(
            st.lists(st.floats(min_value=1e-3, max_value=1.0), min_size=3, max_size=3),
            st.lists(st.floats(min_value=1e-3, max_value=1.0), min_size=3, max_size=3),
        ),
        scale=st.floats(min_value=0.25, max_value=8.0),
        w=st.sampled_from([0.0, 0.25, 0.5, 0.75, 1.0]),
    )
    def test_argmax_invariant_under_common_rescaling(self, weights, scale, w):
        labels = ("c0", "c1", "c2")
        audio_w, text_w = weights
        base = fuse_weighted(
            ClassDistribution.from_weights(labels, audio_w),
            ClassDistribution.from_weights(labels, text_w),
            w,
        )
        scaled = fuse_weighted(
            ClassDistribution.from_weights(labels, [scale * x for x in audio_w]),
            ClassDistribution.from_weights(labels, [scale * x for x in text_w]),
            w,
        )
        assert scaled.label == base.label


def make_records(rows):
    return [
        FusionRecord(f"r{i}", dist(*a, labels=BIN), dist(*t, labels=BIN), gold)
        for i, (a, t, gold) in enumerate(rows)
    ]


class TestSweep:
    def test_endpoint_optimum(self):
        # text matches gold everywhere, audio is inverted
        rows = [
            ((0.9, 0.1), (0.1, 0.9), "positive"),
            ((0.2, 0.8), (0.7, 0.3), "negative"),
        ]
        result = sweep_weights(make_records(rows), grid_step=0.25)
        assert result.best_weight == 0.0
        assert result.best_score == 1.0

    def test_curve_length_and_tie_toward_smaller_weight(self):
        rows = [((0.9, 0.1), (0.9, 0.1), "negative")]
        result = sweep_weights(make_records(rows), grid_step=0.5)
        assert [w for w, _ in result.curve] == [0.0, 0.5, 1.0]
        assert result.best_weight == 0.0

    def test_grid_step_validation(self):
        records = make_records([((0.9, 0.1), (0.1, 0.9), "negative")])
        with pytest.raises(ValueError):
            sweep_weights(records, grid_step=0.3)
        with pytest.raises(ValueError):
            sweep_weights(records, grid_step=0.0)

    def test_no_gold_records(self):
        rows = [((0.9, 0.1), (0.1, 0.9), None)]
        with pytest.raises(EmptyDataset):
            sweep_weights(make_records(rows))

    def test_matches_exhaustive_oracle(self):
        rows = [
            ((0.67, 0.33), (0.27, 0.73), "negative"),
            ((0.65, 0.35), (0.25, 0.75), "positive"),
            ((0.9, 0.1), (0.8, 0.2), "negative"),
            ((0.1, 0.9), (0.2, 0.8), "positive"),
        ]
        result = sweep_weights(make_records(rows), grid_step=0.05)
        oracle_best, oracle_curve = oracle_sweep(
            [(BIN, a, t, g) for a, t, g in rows], 20
        )
        assert result.best_weight == oracle_best == 0.6
        assert len(result.curve) == 21
        for (w1, s1), (w2, s2) in zip(result.curve, oracle_curve):
            assert w1 == w2
            assert abs(s1 - s2) <= 1e-12


class TestSelectionProportions:
    def test_all_audio(self):
        rows = [((0.9, 0.1), (0.6, 0.4), None)] * 3
        assert selection_proportions(make_records(rows)) == (1.0, 0.0)

    def test_one_in_four(self):
        rows = [((0.9, 0.1), (0.6, 0.4), None)] + [
            ((0.55, 0.45), (0.8, 0.2), None)
        ] * 3
        assert selection_proportions(make_records(rows)) == (0.25, 0.75)

    def test_fractions_sum_to_one(self):
        rows = [((0.9, 0.1), (0.6, 0.4), None)] * 7 + [
            ((0.5, 0.5), (0.8, 0.2), None)
        ] * 13
        audio_frac, text_frac = selection_proportions(make_records(rows))
        assert math.isclose(audio_frac + text_frac, 1.0, abs_tol=1e-12)

    def test_empty(self):
        with pytest.raises(EmptyDataset):
            selection_proportions([])
