"""
Arm-difference estimators of the global treatment effect.

All estimators here compare treatment-arm and control-arm averages of some
per-task value. The naive, group and switchback estimators use the per-task
response-time cost; the difference-in-Q estimators use truncated forward sums of
observable costs from ``q_functions``.
"""

import math
from typing import Literal, Optional, Tuple

import numpy as np

from ..errors import DegenerateVariance, InsufficientData, WrongDesign
from ..simulation.event_log import EventLog
from ..simulation.models import GroupDesign, SwitchbackDesign
from ..utils.logger import logger
from ..utils.numerics import exact_mean, sample_covariance, sample_variance
from .costs import CostSeries, arm_masks, estimate_lambda
from .q_functions import QSeries
from .reports import EstimateReport, make_report


QTarget = Literal["q", "w"]

# |denominator| below this fraction of Var(Q_q) counts as degenerate
ALPHA_DEGENERACY = 1e-12


def _two_sample(name: str, values: np.ndarray, actions: np.ndarray, level: Optional[float], **extra) -> EstimateReport:
    treated, control = arm_masks(actions, minimum=2)
    y1 = values[treated]
    y0 = values[control]
    estimate = exact_mean(y1) - exact_mean(y0)
    se = math.sqrt(sample_variance(y0) / y0.size + sample_variance(y1) / y1.size)
    return make_report(name, estimate, se, level, **extra)


def _q_difference(name: str, values: np.ndarray, actions: np.ndarray, log: EventLog, level: Optional[float], **extra) -> EstimateReport:
    """Arm-mean difference of per-task Q-values with SE 2 * sqrt(Var / (T N lambda_hat))."""
    treated, control = arm_masks(actions)
    estimate = exact_mean(values[treated]) - exact_mean(values[control])
    lam = estimate_lambda(log)
    se = 2.0 * math.sqrt(sample_variance(values) / (log.horizon * log.n_servers * lam))
    return make_report(name, estimate, se, level, lambda_hat=lam, **extra)


def estimate_naive(costs: CostSeries, log: EventLog, level: Optional[float] = None) -> EstimateReport:
    """Mean response-time cost of treatment tasks minus that of control tasks."""
    return _two_sample("naive", costs.cost_w, log.action, level)


def q_values(qseries: QSeries, target: QTarget, lambda_hat: float) -> np.ndarray:
    """Per-task values whose arm difference estimates the GTE."""
    if target == "w":
        return qseries.w
    if target == "q":
        return qseries.q / lambda_hat
    raise ValueError(f"unknown Q target '{target}'")


def estimate_dq(
    qseries: QSeries,
    log: EventLog,
    target: QTarget = "w",
    level: Optional[float] = None,
) -> EstimateReport:
    """
    Difference-in-Q estimate from response-time (``"w"``) or queue-length (``"q"``) costs.

    The queue-length version divides by lambda_hat (Little's law).
    """
    lam = estimate_lambda(log)
    values = q_values(qseries, target, lam)
    actions = log.action[: len(qseries)]
    return _q_difference(f"{target}DQ", values, actions, log, level, truncation=qseries.truncation)


def estimate_alpha(qseries: QSeries, lambda_hat: float, strict: bool = False) -> float:
    """
    Variance-minimizing weight of Q_w in alpha * Q_w + (1 - alpha) * Q_q / lambda.

    alpha = (Var(Q_q) - lambda Cov(Q_w, Q_q)) / (lambda^2 Var(Q_w) + Var(Q_q) - 2 lambda Cov(Q_w, Q_q))

    Raises:
        InsufficientData: If fewer than two tasks are eligible
        DegenerateVariance: If ``strict`` and the denominator vanishes;
            otherwise 1.0 is returned with a warning
    """
    if len(qseries) < 2:
        raise InsufficientData(f"alpha needs at least two eligible tasks, have {len(qseries)}")
    var_q = sample_variance(qseries.q)
    var_w = sample_variance(qseries.w)
    cov = sample_covariance(qseries.w, qseries.q)
    numerator = var_q - lambda_hat * cov
    denominator = lambda_hat * lambda_hat * var_w + var_q - 2.0 * lambda_hat * cov
    if denominator <= ALPHA_DEGENERACY * var_q or denominator == 0.0:
        if strict:
            raise DegenerateVariance(f"alpha denominator {denominator:.3e} vanishes")
        logger.warning(f"alpha denominator {denominator:.3e} vanishes, using alpha = 1")
        return 1.0
    return numerator / denominator


def resolve_alpha(qseries: QSeries, lambda_hat: float, alpha: Optional[float] = None) -> Tuple[float, bool]:
    """(alpha, fell_back): a forced weight as given, else the estimate or 1.0 when it is degenerate."""
    if alpha is not None:
        return alpha, False
    try:
        return estimate_alpha(qseries, lambda_hat, strict=True), False
    except DegenerateVariance as e:
        logger.warning(f"{e}, using alpha = 1")
        return 1.0, True


def mixed_values(qseries: QSeries, alpha: float, lambda_hat: float) -> np.ndarray:
    return alpha * qseries.w + (1.0 - alpha) * (qseries.q / lambda_hat)


def estimate_dq_mixed(
    qseries: QSeries,
    log: EventLog,
    alpha: Optional[float] = None,
    level: Optional[float] = None,
) -> EstimateReport:
    """
    Control-variate mix of the response-time and queue-length DQ estimates.

    With ``alpha`` given the weight is forced; alpha = 0 reproduces qDQ and
    alpha = 1 reproduces wDQ exactly.
    """
    lam = estimate_lambda(log)
    alpha, fallback = resolve_alpha(qseries, lam, alpha)
    values = mixed_values(qseries, alpha, lam)
    actions = log.action[: len(qseries)]
    return _q_difference(
        "mixDQ", values, actions, log, level,
        alpha_hat=alpha, alpha_fallback=fallback, truncation=qseries.truncation,
    )


def estimate_group(costs: CostSeries, log: EventLog, level: Optional[float] = None) -> EstimateReport:
    """Naive comparison under the group (split-server) design."""
    if not isinstance(log.config.design, GroupDesign):
        raise WrongDesign(f"group estimator needs a group-design log, got '{log.config.design.kind}'")
    return _two_sample("group", costs.cost_w, log.action, level)


def estimate_switchback(costs: CostSeries, log: EventLog, window: Optional[float] = None, level: Optional[float] = None) -> EstimateReport:
    """Naive comparison under a switchback design with the given window."""
    design = log.config.design
    if not isinstance(design, SwitchbackDesign):
        raise WrongDesign(f"switchback estimator needs a switchback log, got '{design.kind}'")
    if window is not None and window != design.window:
        raise WrongDesign(f"log was generated with window {design.window:g}, not {window:g}")
    return _two_sample("switchback", costs.cost_w, log.action, level)
