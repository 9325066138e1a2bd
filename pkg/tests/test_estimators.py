"""Tests for costs, Q-sums and the arm-difference estimators."""

import logging
import math

import numpy as np
import pytest

from src.errors import (
    ArmEmpty,
    DegenerateVariance,
    InsufficientData,
    MissingObservation,
    NoSamples,
    TruncationTooLong,
    WrongDesign,
)
from src.estimators import (
    compute_costs,
    confidence_interval,
    default_truncation,
    estimate_alpha,
    estimate_dq,
    estimate_dq_mixed,
    estimate_group,
    estimate_lambda,
    estimate_mu,
    estimate_naive,
    estimate_switchback,
    make_report,
    normal_quantile,
    q_forward_sums,
    run_estimators,
)
from src.estimators.costs import CostSeries
from src.estimators.dq import mixed_values
from src.estimators.q_functions import QSeries
from src.simulation import simulate
from src.simulation.models import ExponentialService, GroupDesign, PowerOfD, SwitchbackDesign
from src.utils.numerics import sample_variance


@pytest.fixture(scope="module")
def costs_and_q(bernoulli_log):
    costs = compute_costs(bernoulli_log)
    return costs, q_forward_sums(costs, 40)


class TestCosts:
    def test_known_rate(self, make_config, make_log):
        log = make_log(make_config(), actions=[0, 1], observed=[[3, 1], [2, 2]], servers=[2, 1])
        costs = compute_costs(log)
        np.testing.assert_array_equal(costs.cost_w, [2.0, 3.0])
        np.testing.assert_array_equal(costs.cost_q, [2.0, 2.0])
        assert not costs.delay_adjusted

    def test_delay_adjustment(self, make_config, make_log):
        cfg = make_config(n_servers=20, delay_enabled=True)
        log = make_log(
            cfg, actions=[0], observed=[[3, 1]], servers=[4],
            dispatcher_delay=[0.7], dispatcher_backlog=[4],
        )
        costs = compute_costs(log)
        assert costs.cost_w[0] == pytest.approx(2.7)
        assert costs.cost_q[0] == pytest.approx(2.2)
        assert costs.delay_adjusted

    def test_idle_assignment(self, make_config, make_log):
        log = make_log(make_config(), actions=[1], observed=[[5]], servers=[3], assigned_length=[0])
        costs = compute_costs(log)
        assert costs.cost_w[0] == 1.0
        assert costs.cost_q[0] == 5.0

    def test_rates_follow_server_and_arm(self, make_config, make_log):
        cfg = make_config(
            service_spec=ExponentialService(rates=(1.0, 2.0, 4.0, 0.5)),
            treatment_service_spec=ExponentialService(rates=(2.0,) * 4),
        )
        log = make_log(cfg, actions=[0, 0, 1], observed=[[1], [1], [1]], servers=[2, 3, 3])
        np.testing.assert_array_equal(compute_costs(log).cost_w, [1.0, 0.5, 1.0])

    def test_explicit_rates(self, make_config, make_log):
        log = make_log(make_config(), actions=[0, 1], observed=[[0], [1]], servers=[1, 2])
        costs = compute_costs(log, mu=[2.0, 4.0, 1.0, 1.0])
        np.testing.assert_array_equal(costs.cost_w, [0.5, 0.5])
        with pytest.raises(ValueError):
            compute_costs(log, mu=[1.0])

    def test_missing_observation(self, make_config, make_log):
        log = make_log(make_config(), actions=[0, 1], observed=[[1], []], servers=[1, 2], assigned_length=[1, 0])
        with pytest.raises(MissingObservation):
            compute_costs(log)


class TestRates:
    def test_lambda(self, make_config, make_log):
        cfg = make_config(n_servers=4, horizon=10.0)
        log = make_log(cfg, actions=[0, 1, 0], observed=[[0]] * 3, servers=[1, 2, 3])
        assert estimate_lambda(log) == pytest.approx(3 / 40)

    def test_lambda_empty(self, make_config):
        log = simulate(make_config(horizon=1e-12))
        assert estimate_lambda(log) == 0.0

    def test_mu_single_task(self, make_config, make_log):
        cfg = make_config(
            n_servers=1, service_spec=ExponentialService(rates=(1.0,)), control_policy=PowerOfD(d=1),
        )
        log = make_log(cfg, actions=[0], observed=[[0]], servers=[1], response_time=[2.0])
        np.testing.assert_array_equal(estimate_mu(log), [0.5])

    def test_mu_no_samples(self, make_config, make_log):
        log = make_log(make_config(), actions=[0], observed=[[0]], servers=[1])
        with pytest.raises(NoSamples) as info:
            estimate_mu(log)
        assert info.value.server == 2

    def test_mu_is_consistent(self, bernoulli_log):
        np.testing.assert_allclose(estimate_mu(bernoulli_log), 1.0, rtol=0.1)

    def test_estimated_costs(self, bernoulli_log):
        costs = compute_costs(bernoulli_log, mu="estimated")
        assert costs.cost_w.shape == (len(bernoulli_log),)
        assert np.all(costs.cost_w > 0)

    def test_default_truncation(self, bernoulli_log):
        expected = math.floor(30 * bernoulli_log.n_servers * estimate_lambda(bernoulli_log))
        assert default_truncation(bernoulli_log) == expected


class TestForwardSums:
    def test_hand_example(self):
        costs = CostSeries(cost_w=np.array([1.0, 2.0, 3.0, 4.0]), cost_q=np.array([4.0, 3.0, 2.0, 1.0]))
        q = q_forward_sums(costs, 2)
        np.testing.assert_array_equal(q.w, [6.0, 9.0])
        np.testing.assert_array_equal(q.q, [9.0, 6.0])
        assert len(q) == 2

    def test_zero_truncation_is_costs(self, costs_and_q):
        costs, _ = costs_and_q
        q = q_forward_sums(costs, 0)
        np.testing.assert_array_equal(q.w, costs.cost_w)
        np.testing.assert_array_equal(q.q, costs.cost_q)

    @pytest.mark.parametrize("L", [-1, 4, 10])
    def test_truncation_too_long(self, L):
        costs = CostSeries(cost_w=np.ones(4), cost_q=np.ones(4))
        with pytest.raises(TruncationTooLong):
            q_forward_sums(costs, L)


class TestNaive:
    def test_shifted_arms(self, make_config, make_log):
        log = make_log(
            make_config(), actions=[0, 1, 0, 1, 0, 1],
            observed=[[0], [1], [2], [3], [1], [2]], servers=[1, 2, 3, 4, 1, 2],
        )
        report = estimate_naive(compute_costs(log), log)
        assert report.point_estimate == pytest.approx(1.0)
        assert report.ci_low <= report.point_estimate <= report.ci_high

    def test_needs_two_per_arm(self, make_config, make_log):
        log = make_log(make_config(), actions=[0, 0, 1], observed=[[0], [1], [2]], servers=[1, 2, 3])
        with pytest.raises(ArmEmpty):
            estimate_naive(compute_costs(log), log)


class TestDQ:
    def test_window_collapse(self, bernoulli_log):
        costs = compute_costs(bernoulli_log)
        naive = estimate_naive(costs, bernoulli_log)
        wdq = estimate_dq(q_forward_sums(costs, 0), bernoulli_log, "w")
        assert wdq.point_estimate == pytest.approx(naive.point_estimate, abs=1e-12)

    def test_names_and_truncation(self, bernoulli_log, costs_and_q):
        _, q = costs_and_q
        assert estimate_dq(q, bernoulli_log, "q").estimator_name == "qDQ"
        report = estimate_dq(q, bernoulli_log, "w")
        assert report.estimator_name == "wDQ"
        assert report.truncation == 40
        assert report.lambda_hat == pytest.approx(estimate_lambda(bernoulli_log))

    def test_treatment_policy_is_worse(self, bernoulli_log, costs_and_q):
        # power-of-1 treatment against power-of-2 control raises response times
        _, q = costs_and_q
        assert estimate_dq(q, bernoulli_log, "w").point_estimate > 0

    def test_mixed_endpoints(self, bernoulli_log, costs_and_q):
        _, q = costs_and_q
        qdq = estimate_dq(q, bernoulli_log, "q")
        wdq = estimate_dq(q, bernoulli_log, "w")
        assert estimate_dq_mixed(q, bernoulli_log, alpha=0.0).point_estimate == qdq.point_estimate
        assert estimate_dq_mixed(q, bernoulli_log, alpha=1.0).point_estimate == wdq.point_estimate
        assert estimate_dq_mixed(q, bernoulli_log, alpha=0.0).std_error == qdq.std_error

    def test_mixed_reports_alpha(self, bernoulli_log, costs_and_q):
        _, q = costs_and_q
        report = estimate_dq_mixed(q, bernoulli_log)
        assert report.alpha_hat == estimate_alpha(q, estimate_lambda(bernoulli_log))
        assert not report.alpha_fallback

    def test_mixed_variance_is_minimal(self, bernoulli_log, costs_and_q):
        _, q = costs_and_q
        lam = estimate_lambda(bernoulli_log)
        alpha = estimate_alpha(q, lam)
        best = sample_variance(mixed_values(q, alpha, lam))
        assert best <= sample_variance(mixed_values(q, 0.0, lam)) * (1 + 1e-12)
        assert best <= sample_variance(mixed_values(q, 1.0, lam)) * (1 + 1e-12)

    def test_arm_symmetry(self, bernoulli_log):
        swapped = bernoulli_log.swap_arms()
        costs, costs_s = compute_costs(bernoulli_log), compute_costs(swapped)
        q, q_s = q_forward_sums(costs, 30), q_forward_sums(costs_s, 30)
        pairs = [
            (estimate_naive(costs, bernoulli_log), estimate_naive(costs_s, swapped)),
            (estimate_dq(q, bernoulli_log, "q"), estimate_dq(q_s, swapped, "q")),
            (estimate_dq(q, bernoulli_log, "w"), estimate_dq(q_s, swapped, "w")),
            (estimate_dq_mixed(q, bernoulli_log), estimate_dq_mixed(q_s, swapped)),
        ]
        for original, mirrored in pairs:
            assert mirrored.point_estimate == -original.point_estimate

    def test_pure_function(self, bernoulli_log, costs_and_q):
        _, q = costs_and_q
        assert estimate_dq_mixed(q, bernoulli_log) == estimate_dq_mixed(q, bernoulli_log)


class TestAlpha:
    def test_half(self):
        lam = 0.5
        q = QSeries(truncation=0, q=np.array([0.0, 0.0, lam, -lam]), w=np.array([1.0, -1.0, 0.0, 0.0]))
        assert estimate_alpha(q, lam) == pytest.approx(0.5)

    def test_degenerate(self):
        lam = 0.5
        w = np.array([1.0, 3.0, 2.0, 7.0])
        q = QSeries(truncation=0, q=lam * w, w=w)
        with pytest.raises(DegenerateVariance):
            estimate_alpha(q, lam, strict=True)
        assert estimate_alpha(q, lam) == 1.0

    def test_single_task(self):
        q = QSeries(truncation=0, q=np.array([1.0]), w=np.array([2.0]))
        with pytest.raises(InsufficientData):
            estimate_alpha(q, 0.5)

    def test_fallback_is_logged(self, caplog):
        lam = 0.5
        w = np.array([1.0, 3.0, 2.0, 7.0])
        q = QSeries(truncation=0, q=lam * w, w=w)
        with caplog.at_level(logging.WARNING, logger="queue_ab"):
            estimate_alpha(q, lam)
        assert "vanishes, using alpha = 1" in caplog.text

    def test_failed_estimator_is_logged(self, bernoulli_log, caplog):
        with caplog.at_level(logging.WARNING, logger="queue_ab"):
            _, failures = run_estimators(bernoulli_log, ["group"])
        assert isinstance(failures["group"], WrongDesign)
        assert "Estimator group failed" in caplog.text

    def test_degenerate_mixed_falls_back(self, make_config, make_log):
        log = make_log(make_config(), actions=[0, 1, 0, 1], observed=[[1], [3], [2], [7]], servers=[1, 2, 3, 4])
        lam = estimate_lambda(log)
        w = np.array([1.0, 3.0, 2.0, 7.0])
        q = QSeries(truncation=0, q=lam * w, w=w)
        report = estimate_dq_mixed(q, log)
        assert report.alpha_hat == 1.0
        assert report.alpha_fallback

    def test_matches_grid_search(self):
        rng = np.random.default_rng(4)
        lam = 0.8
        w = rng.normal(10.0, 2.0, size=2000)
        qv = lam * w * 0.6 + rng.normal(5.0, 1.5, size=2000)
        q = QSeries(truncation=0, q=qv, w=w)
        alpha = estimate_alpha(q, lam)
        grid = np.linspace(alpha - 0.01, alpha + 0.01, 20001)
        variances = [np.var(a * w + (1 - a) * qv / lam, ddof=1) for a in grid]
        assert grid[int(np.argmin(variances))] == pytest.approx(alpha, abs=1e-6)


class TestDesignEstimators:
    def test_group(self, make_config):
        log = simulate(make_config(n_servers=6, design=GroupDesign(), horizon=500.0))
        report = estimate_group(compute_costs(log), log)
        assert report.estimator_name == "group"
        assert math.isfinite(report.point_estimate)

    def test_group_wrong_design(self, bernoulli_log):
        with pytest.raises(WrongDesign):
            estimate_group(compute_costs(bernoulli_log), bernoulli_log)

    def test_switchback(self, make_config):
        log = simulate(make_config(design=SwitchbackDesign(window=20.0), horizon=400.0))
        costs = compute_costs(log)
        assert estimate_switchback(costs, log, 20.0).estimator_name == "switchback"
        with pytest.raises(WrongDesign):
            estimate_switchback(costs, log, 50.0)

    def test_switchback_window_covering_horizon(self, make_config):
        log = simulate(make_config(design=SwitchbackDesign(window=500.0), horizon=400.0))
        with pytest.raises(ArmEmpty):
            estimate_switchback(compute_costs(log), log)

    def test_switchback_wrong_design(self, bernoulli_log):
        with pytest.raises(WrongDesign):
            estimate_switchback(compute_costs(bernoulli_log), bernoulli_log)


class TestConfidenceInterval:
    def test_quantile(self):
        assert normal_quantile(0.95) == pytest.approx(1.959964, abs=1e-6)

    @pytest.mark.parametrize("level", [0.0, 1.0])
    def test_level_bounds(self, level):
        with pytest.raises(ValueError):
            normal_quantile(level)

    def test_zero_width(self):
        report = make_report("x", 0.3, 0.0, 0.95)
        assert confidence_interval(report, 0.95) == (0.3, 0.3)

    def test_interval(self):
        report = make_report("x", 1.0, 0.5, 0.9)
        lo, hi = confidence_interval(report, 0.9)
        assert (lo, hi) == pytest.approx((report.ci_low, report.ci_high))
        assert hi - lo == pytest.approx(2 * 0.5 * 1.644854, abs=1e-5)
