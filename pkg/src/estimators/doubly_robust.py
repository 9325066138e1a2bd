"""
Doubly-robust difference-in-Q.

A linear regression of each task's Q-value on the queue-length cost of the
task and its four predecessors is subtracted from the Q-value, and the
residual is reweighted by the inverse empirical arm probability. The
regression does not see the action, so it only removes variance.
"""

import math
from dataclasses import dataclass
from typing import Literal, Optional, Tuple

import numpy as np

from ..errors import InsufficientData
from ..simulation.event_log import EventLog
from ..utils.numerics import exact_mean, exact_sum, sample_variance
from .costs import CostSeries, arm_masks, estimate_lambda
from .dq import mixed_values, resolve_alpha
from .q_functions import QSeries
from .reports import EstimateReport, make_report


DRTarget = Literal["q", "w", "mix"]

LAGS = 5
RIDGE = 1e-10


@dataclass(frozen=True)
class RegressionFit:
    """Q ~ intercept + sum_u coefficients[u] * cost_q[j - u], u = 0..4."""
    intercept: float
    coefficients: Tuple[float, ...]
    target: str = "q"
    alpha: Optional[float] = None
    alpha_fallback: bool = False
    residual_sum_of_squares: float = float("nan")

    def predict(self, cost_q: np.ndarray, n_eligible: int) -> np.ndarray:
        """Predictions for tasks ``LAGS - 1 .. n_eligible - 1``."""
        return _design_matrix(cost_q, n_eligible) @ np.array((self.intercept, *self.coefficients))


def _design_matrix(cost_q: np.ndarray, n_eligible: int) -> np.ndarray:
    first = LAGS - 1
    columns = [np.ones(n_eligible - first)]
    for u in range(LAGS):
        columns.append(cost_q[first - u: n_eligible - u])
    return np.column_stack(columns)


def _target_values(
    qseries: QSeries, target: DRTarget, lambda_hat: float, alpha: Optional[float],
) -> Tuple[np.ndarray, Optional[float], bool]:
    if target == "q":
        return qseries.q, None, False
    if target == "w":
        return qseries.w, None, False
    if target == "mix":
        alpha, fallback = resolve_alpha(qseries, lambda_hat, alpha)
        # mixed values are on the response-time scale; rescale to Q_q units
        return mixed_values(qseries, alpha, lambda_hat) * lambda_hat, alpha, fallback
    raise ValueError(f"unknown regression target '{target}'")


def fit_q_regression(
    costs: CostSeries,
    qseries: QSeries,
    target: DRTarget = "q",
    lambda_hat: Optional[float] = None,
    alpha: Optional[float] = None,
) -> RegressionFit:
    """
    Least-squares fit of the Q-value on five lags of the queue-length cost.

    Solves the normal equations with a ridge of 1e-10 times the mean diagonal
    of X'X.

    Raises:
        InsufficientData: If fewer than six rows are available
    """
    n = len(qseries)
    rows = n - (LAGS - 1)
    if rows < LAGS + 1:
        raise InsufficientData(f"regression needs at least {LAGS + 1} rows, have {max(rows, 0)}")
    if lambda_hat is None:
        if target == "mix":
            raise ValueError("the mixed target needs lambda_hat")
        lambda_hat = 1.0
    y, alpha, fallback = _target_values(qseries, target, lambda_hat, alpha)
    y = y[LAGS - 1:]
    x = _design_matrix(costs.cost_q, n)
    xtx = x.T @ x
    ridge = RIDGE * float(np.mean(np.diag(xtx)))
    beta = np.linalg.solve(xtx + ridge * np.eye(xtx.shape[0]), x.T @ y)
    residuals = y - x @ beta
    return RegressionFit(
        intercept=float(beta[0]),
        coefficients=tuple(float(b) for b in beta[1:]),
        target=target,
        alpha=alpha,
        alpha_fallback=fallback,
        residual_sum_of_squares=exact_sum(residuals * residuals),
    )


def estimate_dq_doubly_robust(
    qseries: QSeries,
    costs: CostSeries,
    log: EventLog,
    target: DRTarget = "q",
    regression: Optional[RegressionFit] = None,
    alpha: Optional[float] = None,
    level: Optional[float] = None,
) -> EstimateReport:
    """
    Doubly-robust DQ over tasks j >= 4.

    Per task, d_j = (Q_j - REG_j) / p_hat for treatment and -(Q_j - REG_j) /
    (1 - p_hat) for control, with p_hat counted over the same tasks. The
    estimate is mean(d_j), divided by lambda_hat on the queue-length scale.
    """
    lam = estimate_lambda(log)
    if regression is None:
        regression = fit_q_regression(costs, qseries, target, lam, alpha)
    n = len(qseries)
    if alpha is None and regression.alpha is not None:
        alpha, fallback = regression.alpha, regression.alpha_fallback
        values, _, _ = _target_values(qseries, target, lam, alpha)
    else:
        values, alpha, fallback = _target_values(qseries, target, lam, alpha)
    first = LAGS - 1
    if n - first < LAGS + 1:
        raise InsufficientData(f"doubly-robust estimate needs at least {LAGS + 1} tasks past the lags")
    residual = values[first:] - regression.predict(costs.cost_q, n)
    actions = log.action[first:n]
    treated, control = arm_masks(actions)
    m = actions.size
    p_treated = np.count_nonzero(treated) / m
    p_control = np.count_nonzero(control) / m
    contributions = np.where(treated, residual / p_treated, -residual / p_control)
    if target != "w":
        contributions = contributions / lam
    estimate = exact_mean(contributions)
    se = 2.0 * math.sqrt(sample_variance(contributions) / (log.horizon * log.n_servers * lam))
    return make_report(
        f"{target}DQ-DR", estimate, se, level,
        alpha_hat=alpha, alpha_fallback=fallback, lambda_hat=lam, truncation=qseries.truncation,
    )
