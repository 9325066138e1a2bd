"""Tests for compensated reductions."""

import numpy as np
import pytest

from src.utils.numerics import (
    exact_mean,
    exact_sum,
    sample_covariance,
    sample_std,
    sample_variance,
    sliding_window_sums,
)


class TestExactSum:
    def test_cancellation(self):
        assert exact_sum([1e16, 1.0, -1e16]) == 1.0

    def test_numpy_input(self):
        assert exact_sum(np.array([0.1] * 10)) == 1.0

    def test_mean_of_empty(self):
        with pytest.raises(ValueError):
            exact_mean([])


class TestMoments:
    def test_matches_numpy(self):
        rng = np.random.default_rng(0)
        x, y = rng.normal(size=500), rng.normal(size=500)
        assert sample_variance(x) == pytest.approx(np.var(x, ddof=1), rel=1e-12)
        assert sample_covariance(x, y) == pytest.approx(np.cov(x, y)[0, 1], rel=1e-10)

    def test_needs_two_samples(self):
        with pytest.raises(ValueError):
            sample_variance([1.0])
        assert sample_std([1.0]) is None
        assert sample_std([1.0, 3.0]) == pytest.approx(np.sqrt(2.0))


class TestSlidingWindow:
    def test_hand_sums(self):
        np.testing.assert_array_equal(sliding_window_sums([1.0, 2.0, 3.0, 4.0], 3), [6.0, 9.0])

    def test_window_of_one_is_identity(self):
        x = np.array([0.1, 0.7, 1e-9])
        out = sliding_window_sums(x, 1)
        np.testing.assert_array_equal(out, x)
        assert out is not x

    def test_matches_brute_force(self):
        rng = np.random.default_rng(1)
        x = rng.exponential(size=100_000)
        window = 37
        out = sliding_window_sums(x, window)
        cumulative = np.concatenate([[0.0], np.cumsum(x)])
        assert out.shape == (x.size - window + 1,)
        for j in (0, 1, 500, 54_321, x.size - window):
            assert out[j] == pytest.approx(exact_sum(x[j:j + window]), rel=1e-10)
        np.testing.assert_allclose(out, cumulative[window:] - cumulative[:-window], rtol=1e-8)

    @pytest.mark.parametrize("window", [0, 5])
    def test_bad_window(self, window):
        with pytest.raises(ValueError):
            sliding_window_sums([1.0, 2.0, 3.0], window)
