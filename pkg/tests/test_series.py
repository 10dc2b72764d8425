"""Preprocessing: detrend, z-score, min-max rescale, segmentation, resampling."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fieldnet.errors import DegenerateInputError
from fieldnet.series import (
    Segment,
    TimeSeries,
    detrend_linear,
    rescale_minmax,
    resample_to_length,
    segment_by_label,
    zscore,
)

finite_series = st.lists(
    st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False),
    min_size=2,
    max_size=40,
)


class TestTimeSeries:
    def test_labels_must_match_length(self):
        with pytest.raises(ValueError):
            TimeSeries([1.0, 2.0, 3.0], labels=("a", "b"))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            TimeSeries([1.0, np.nan])

    def test_segment_needs_two_samples(self):
        with pytest.raises(DegenerateInputError):
            Segment([1.0], "coco")


class TestDetrendLinear:
    def test_constant_series_is_its_own_trend(self):
        assert np.allclose(detrend_linear([2, 2, 2]).values, [0, 0, 0], atol=1e-12)

    def test_exact_line_vanishes(self):
        assert np.allclose(detrend_linear([1, 2, 3]).values, [0, 0, 0], atol=1e-12)

    def test_closed_form_normal_equations(self):
        # independent oracle: solve the 2x2 normal equations directly
        values = np.array([1.0, 3.0, 2.0])
        x = np.arange(3.0)
        a_matrix = np.array([[3.0, x.sum()], [x.sum(), (x * x).sum()]])
        intercept, slope = np.linalg.solve(a_matrix, [values.sum(), (x * values).sum()])
        expected = values - (intercept + slope * x)
        result = detrend_linear(values).values
        assert np.allclose(result, expected, atol=1e-12)
        assert np.allclose(result, [-0.5, 1.0, -0.5], atol=1e-12)

    def test_too_short(self):
        with pytest.raises(DegenerateInputError):
            detrend_linear([1.0])

    @given(finite_series)
    @settings(max_examples=200, deadline=None)
    def test_residuals_sum_to_zero(self, values):
        residuals = detrend_linear(values).values
        assert abs(residuals.sum()) <= 1e-12 * max(1.0, np.abs(values).sum())

    def test_labels_pass_through(self):
        ts = TimeSeries([1.0, 5.0, 2.0], labels=("a", "a", "b"))
        assert detrend_linear(ts).labels == ("a", "a", "b")


class TestZscore:
    def test_constant_maps_to_zeros(self):
        assert np.array_equal(zscore([5, 5, 5, 5]).values, np.zeros(4))

    def test_population_std_convention(self):
        # (x - 2) / sqrt(2/3), verified by direct mean/variance computation
        expected = (np.array([1.0, 2.0, 3.0]) - 2.0) / np.sqrt(2.0 / 3.0)
        assert np.allclose(zscore([1, 2, 3]).values, expected, atol=1e-12)
        assert np.allclose(zscore([1, 2, 3]).values, [-1.224744871391589, 0.0, 1.224744871391589])

    def test_two_point_case(self):
        assert np.allclose(zscore([0, 2]).values, [-1.0, 1.0], atol=1e-12)

    @given(finite_series)
    @settings(max_examples=200, deadline=None)
    def test_output_moments(self, values):
        out = zscore(values).values
        if max(values) == min(values):
            assert np.array_equal(out, np.zeros_like(out))
        else:
            assert abs(out.mean()) <= 1e-12
            assert abs(out.std() - 1.0) <= 1e-12

    @given(finite_series.filter(lambda v: np.std(v) > 1e-6))
    @settings(max_examples=200, deadline=None)
    def test_idempotent_on_normalized_data(self, values):
        once = zscore(values).values
        twice = zscore(once).values
        assert np.allclose(once, twice, atol=1e-12)


class TestRescaleMinmax:
    def test_symmetric_endpoints(self):
        assert np.allclose(rescale_minmax([0, 5, 10]).values, [-1, 0, 1], atol=1e-15)

    def test_constant_maps_to_zeros(self):
        assert np.array_equal(rescale_minmax([7, 7, 7]).values, np.zeros(3))

    def test_affine_formula(self):
        assert np.allclose(rescale_minmax([1, 2, 4]).values, [-1, -1 / 3, 1], atol=1e-15)

    @given(finite_series.filter(lambda v: max(v) > min(v)))
    @settings(max_examples=200, deadline=None)
    def test_extremes_map_exactly(self, values):
        out = rescale_minmax(values).values
        assert out.min() == -1.0
        assert out.max() == 1.0
        assert np.all(out >= -1.0) and np.all(out <= 1.0)


class TestSegmentByLabel:
    def test_interleaved_split(self):
        ts = TimeSeries([1, 2, 3, 4], labels=("a", "b", "a", "b"))
        segs = segment_by_label(ts)
        assert [s.class_label for s in segs] == ["a", "b"]
        assert np.array_equal(segs[0].values, [1, 3])
        assert np.array_equal(segs[1].values, [2, 4])

    def test_run_of_37_with_three_parts(self):
        labels = ("coco",) * 14 + ("imagenet",) * 13 + ("sun",) * 10
        ts = TimeSeries(np.arange(37.0), labels=labels)
        segs = segment_by_label(ts)
        assert [len(s) for s in segs] == [14, 13, 10]

    def test_single_label_is_identity(self):
        ts = TimeSeries([9, 8, 7], labels=("x", "x", "x"))
        (seg,) = segment_by_label(ts)
        assert np.array_equal(seg.values, ts.values)

    def test_short_segment_rejected(self):
        ts = TimeSeries([1, 2, 3], labels=("a", "a", "b"))
        with pytest.raises(DegenerateInputError):
            segment_by_label(ts)

    def test_requires_labels(self):
        with pytest.raises(ValueError):
            segment_by_label(TimeSeries([1.0, 2.0]))

    @given(
        st.lists(
            st.tuples(
                st.floats(min_value=-100, max_value=100, allow_nan=False),
                st.sampled_from(["a", "b", "c"]),
            ),
            min_size=2,
            max_size=40,
        ).filter(lambda pairs: all(
            sum(1 for _, l in pairs if l == lab) != 1 for lab in {l for _, l in pairs}
        ))
    )
    @settings(max_examples=150, deadline=None)
    def test_multiset_and_order_preserved(self, pairs):
        values = [v for v, _ in pairs]
        labels = [l for _, l in pairs]
        segs = segment_by_label(TimeSeries(values, labels=tuple(labels)))
        rebuilt = sorted((v, s.class_label) for s in segs for v in s.values)
        assert rebuilt == sorted(zip(values, labels))
        for seg in segs:
            within = [v for v, l in pairs if l == seg.class_label]
            assert np.array_equal(seg.values, within)


class TestResampleToLength:
    def test_identity_at_equal_length(self):
        seg = Segment([4.0, 8.0, 6.0], "a")
        out = resample_to_length(seg, 3)
        assert np.array_equal(out.values, seg.values)

    def test_linear_interpolation(self):
        out = resample_to_length(Segment([0.0, 1.0], "a"), 3)
        assert np.allclose(out.values, [0.0, 0.5, 1.0], atol=1e-15)

    def test_downsample_keeps_endpoints(self):
        out = resample_to_length(Segment([0.0, 2.0, 4.0, 6.0], "a"), 2)
        assert np.array_equal(out.values, [0.0, 6.0])

    def test_invalid_target(self):
        with pytest.raises(DegenerateInputError):
            resample_to_length(Segment([1.0, 2.0], "a"), 1)

    @given(finite_series, st.integers(min_value=2, max_value=50))
    @settings(max_examples=200, deadline=None)
    def test_endpoints_always_exact(self, values, m):
        out = resample_to_length(Segment(values, "a"), m)
        assert len(out) == m
        assert out.values[0] == values[0]
        assert out.values[-1] == values[-1]
