"""Global-treatment-effect estimators over event logs."""

from .costs import CostSeries, compute_costs, default_truncation, estimate_lambda, estimate_mu
from .q_functions import QSeries, q_forward_sums
from .reports import EstimateReport, confidence_interval, make_report, normal_quantile
from .dq import (
    estimate_alpha,
    estimate_dq,
    estimate_dq_mixed,
    estimate_group,
    estimate_naive,
    estimate_switchback,
    resolve_alpha,
)
from .doubly_robust import RegressionFit, estimate_dq_doubly_robust, fit_q_regression
from .registry import (
    ESTIMATOR_NAMES,
    EstimationContext,
    EstimatorSpec,
    default_estimators,
    run_estimator,
    run_estimators,
)

__all__ = [
    "CostSeries",
    "ESTIMATOR_NAMES",
    "EstimateReport",
    "EstimationContext",
    "EstimatorSpec",
    "QSeries",
    "RegressionFit",
    "compute_costs",
    "confidence_interval",
    "default_estimators",
    "default_truncation",
    "estimate_alpha",
    "estimate_dq",
    "estimate_dq_doubly_robust",
    "estimate_dq_mixed",
    "estimate_group",
    "estimate_lambda",
    "estimate_mu",
    "estimate_naive",
    "estimate_switchback",
    "fit_q_regression",
    "make_report",
    "normal_quantile",
    "q_forward_sums",
    "resolve_alpha",
    "run_estimator",
    "run_estimators",
]
