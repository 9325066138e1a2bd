"""Estimate reports and normal-approximation confidence intervals."""

from dataclasses import dataclass, replace
from typing import Optional, Tuple

from scipy import stats

from config.settings import settings


def normal_quantile(level: float) -> float:
    """Two-sided standard-normal critical value z with P(|Z| <= z) = level."""
    if not 0.0 < level < 1.0:
        raise ValueError(f"confidence level must lie in (0, 1), got {level}")
    return float(stats.norm.ppf(0.5 + level / 2.0))


@dataclass(frozen=True)
class EstimateReport:
    """
    Result of one estimator on one event log.

    Attributes:
        estimator_name: Registry name or label
        point_estimate: Estimated GTE (time units)
        std_error: Standard error of the estimate
        ci_low: Lower confidence bound
        ci_high: Upper confidence bound
        level: Confidence level of the interval
        alpha_hat: Control-variate weight (mixed estimators)
        alpha_fallback: True when alpha_hat fell back to 1 on a degenerate variance
        lambda_hat: Estimated per-server arrival rate
        mu_hat: Estimated service rates when they were estimated
        truncation: L used by Q-based estimators
    """
    estimator_name: str
    point_estimate: float
    std_error: float
    ci_low: float
    ci_high: float
    level: float
    alpha_hat: Optional[float] = None
    alpha_fallback: bool = False
    lambda_hat: Optional[float] = None
    mu_hat: Optional[Tuple[float, ...]] = None
    truncation: Optional[int] = None

    def relabel(self, name: str) -> "EstimateReport":
        return replace(self, estimator_name=name)


def confidence_interval(report: EstimateReport, level: float) -> Tuple[float, float]:
    """estimate -/+ z * SE at ``level``."""
    z = normal_quantile(level)
    half = z * report.std_error
    return report.point_estimate - half, report.point_estimate + half


def make_report(
    name: str,
    estimate: float,
    std_error: float,
    level: Optional[float] = None,
    **extra,
) -> EstimateReport:
    """Build a report with its interval filled in."""
    level = settings.confidence_level if level is None else level
    half = normal_quantile(level) * std_error
    return EstimateReport(
        estimator_name=name,
        point_estimate=estimate,
        std_error=std_error,
        ci_low=estimate - half,
        ci_high=estimate + half,
        level=level,
        **extra,
    )
