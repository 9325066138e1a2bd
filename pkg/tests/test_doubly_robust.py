"""Tests for the regression-adjusted (doubly-robust) DQ estimators."""

import numpy as np
import pytest

from src.errors import InsufficientData
from src.estimators import compute_costs, estimate_dq_doubly_robust, estimate_lambda, fit_q_regression, q_forward_sums
from src.estimators.costs import CostSeries
from src.estimators.doubly_robust import LAGS, RegressionFit
from src.estimators.q_functions import QSeries
from src.utils.numerics import exact_mean


@pytest.fixture(scope="module")
def series(bernoulli_log):
    costs = compute_costs(bernoulli_log)
    return costs, q_forward_sums(costs, 20)


def _linear_series(n: int = 400, seed: int = 3):
    rng = np.random.default_rng(seed)
    cost_q = rng.uniform(0.0, 5.0, size=n)
    costs = CostSeries(cost_w=cost_q + 1.0, cost_q=cost_q)
    qseries = QSeries(truncation=0, q=2.0 + 3.0 * cost_q, w=cost_q + 1.0)
    return costs, qseries


class TestRegression:
    def test_recovers_linear_target(self):
        costs, qseries = _linear_series()
        fit = fit_q_regression(costs, qseries, "q")
        assert fit.intercept == pytest.approx(2.0, abs=1e-6)
        np.testing.assert_allclose(fit.coefficients, [3.0, 0.0, 0.0, 0.0, 0.0], atol=1e-6)
        assert fit.residual_sum_of_squares == pytest.approx(0.0, abs=1e-8)

    def test_constant_costs(self):
        n = 50
        costs = CostSeries(cost_w=np.full(n, 2.0), cost_q=np.full(n, 1.5))
        qseries = QSeries(truncation=0, q=np.full(n, 4.0), w=np.full(n, 2.0))
        fit = fit_q_regression(costs, qseries, "q")
        predictions = fit.predict(costs.cost_q, n)
        np.testing.assert_allclose(predictions, 4.0, rtol=1e-6)

    def test_lags_do_not_hurt_fit(self, series):
        costs, qseries = series
        fit = fit_q_regression(costs, qseries, "q")
        first = LAGS - 1
        y = qseries.q[first:]
        x = np.column_stack([np.ones(y.size), costs.cost_q[first:len(qseries)]])
        beta, *_ = np.linalg.lstsq(x, y, rcond=None)
        single_rss = float(np.sum((y - x @ beta) ** 2))
        assert fit.residual_sum_of_squares <= single_rss * (1 + 1e-8)

    def test_mix_needs_lambda(self, series):
        costs, qseries = series
        with pytest.raises(ValueError):
            fit_q_regression(costs, qseries, "mix")

    def test_too_few_rows(self):
        n = LAGS + 4
        costs = CostSeries(cost_w=np.ones(n), cost_q=np.arange(n, dtype=float))
        qseries = QSeries(truncation=0, q=np.arange(n, dtype=float), w=np.ones(n))
        with pytest.raises(InsufficientData):
            fit_q_regression(costs, qseries)


class TestDoublyRobust:
    def test_zero_regression_is_plain_dq(self, bernoulli_log, series):
        costs, qseries = series
        zero = RegressionFit(intercept=0.0, coefficients=(0.0,) * LAGS)
        report = estimate_dq_doubly_robust(qseries, costs, bernoulli_log, "q", regression=zero)

        first = LAGS - 1
        lam = estimate_lambda(bernoulli_log)
        values = qseries.q[first:] / lam
        actions = bernoulli_log.action[first:len(qseries)]
        expected = exact_mean(values[actions == 1]) - exact_mean(values[actions == 0])
        assert report.point_estimate == pytest.approx(expected, abs=1e-10)

    def test_exact_regression_leaves_nothing(self, make_config, make_log):
        costs, qseries = _linear_series(n=60)
        actions = [j % 2 for j in range(60)]
        log = make_log(make_config(horizon=60.0), actions=actions, observed=[[0]] * 60, servers=[1] * 60)
        report = estimate_dq_doubly_robust(qseries, costs, log, "q")
        assert report.point_estimate == pytest.approx(0.0, abs=1e-5)

    @pytest.mark.parametrize("target", ["q", "w", "mix"])
    def test_names(self, bernoulli_log, series, target):
        costs, qseries = series
        report = estimate_dq_doubly_robust(qseries, costs, bernoulli_log, target)
        assert report.estimator_name == f"{target}DQ-DR"
        assert report.std_error > 0
        assert report.ci_low <= report.point_estimate <= report.ci_high

    def test_mix_reports_alpha(self, bernoulli_log, series):
        costs, qseries = series
        report = estimate_dq_doubly_robust(qseries, costs, bernoulli_log, "mix", alpha=0.25)
        assert report.alpha_hat == 0.25

    def test_arm_symmetry(self, bernoulli_log):
        swapped = bernoulli_log.swap_arms()
        costs, costs_s = compute_costs(bernoulli_log), compute_costs(swapped)
        q, q_s = q_forward_sums(costs, 20), q_forward_sums(costs_s, 20)
        original = estimate_dq_doubly_robust(q, costs, bernoulli_log, "w")
        mirrored = estimate_dq_doubly_robust(q_s, costs_s, swapped, "w")
        assert mirrored.point_estimate == pytest.approx(-original.point_estimate, rel=1e-12, abs=1e-12)

    def test_degenerate_mix_falls_back(self, make_config, make_log):
        costs, _ = _linear_series(n=40)
        w = costs.cost_w
        qseries = QSeries(truncation=0, q=0.5 * w, w=w)
        actions = [j % 2 for j in range(40)]
        log = make_log(make_config(horizon=20.0), actions=actions, observed=[[0]] * 40, servers=[1] * 40)
        assert estimate_lambda(log) == 0.5

        fit = fit_q_regression(costs, qseries, "mix", lambda_hat=0.5)
        assert fit.alpha == 1.0
        assert fit.alpha_fallback

        report = estimate_dq_doubly_robust(qseries, costs, log, "mix")
        assert report.alpha_hat == 1.0
        assert report.alpha_fallback

    def test_forced_alpha_is_not_a_fallback(self, bernoulli_log, series):
        costs, qseries = series
        report = estimate_dq_doubly_robust(qseries, costs, bernoulli_log, "mix", alpha=1.0)
        assert not report.alpha_fallback
