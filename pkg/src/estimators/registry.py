"""
Named estimators and a per-log evaluation context.

``EstimatorSpec("mixDQ", truncation=600)`` describes one run; an
``EstimationContext`` holds the log, its costs and the Q-series per
truncation so several estimators on the same log share that work.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Tuple, Union

from ..errors import EstimationError
from ..simulation.event_log import EventLog
from ..simulation.models import DesignSpec, GroupDesign, SwitchbackDesign
from ..utils.logger import logger
from .costs import CostSeries, RateChoice, compute_costs, default_truncation
from .doubly_robust import estimate_dq_doubly_robust
from .dq import (
    estimate_dq,
    estimate_dq_mixed,
    estimate_group,
    estimate_naive,
    estimate_switchback,
)
from .q_functions import QSeries, q_forward_sums
from .reports import EstimateReport


ESTIMATOR_NAMES: Tuple[str, ...] = (
    "naive",
    "qDQ",
    "wDQ",
    "mixDQ",
    "group",
    "switchback",
    "qDQ-DR",
    "wDQ-DR",
    "mixDQ-DR",
)


@dataclass(frozen=True)
class EstimatorSpec:
    """
    One estimator run.

    Attributes:
        name: Registry name
        truncation: L for Q-based estimators; None uses the default for the log
        label: Display name in reports and summaries
        alpha: Forced control-variate weight for the mixed estimators
        window: Switchback window the log must come from
    """
    name: str
    truncation: Optional[int] = None
    label: Optional[str] = None
    alpha: Optional[float] = None
    window: Optional[float] = None

    def __post_init__(self):
        if self.name not in ESTIMATOR_NAMES:
            raise ValueError(f"unknown estimator '{self.name}'; choose from {', '.join(ESTIMATOR_NAMES)}")
        if self.truncation is not None and self.truncation < 0:
            raise ValueError("truncation must be non-negative")

    @property
    def display_name(self) -> str:
        return self.label or self.name

    def design_for(self, base: DesignSpec) -> DesignSpec:
        """Design of the log this estimator reads when the experiment runs under ``base``."""
        if self.name == "group":
            return GroupDesign()
        if self.name == "switchback":
            if self.window is None:
                if not isinstance(base, SwitchbackDesign):
                    raise ValueError("switchback estimator needs a window")
                return base
            return SwitchbackDesign(window=self.window)
        return base


@dataclass
class EstimationContext:
    """Log plus lazily computed costs and Q-series."""
    log: EventLog
    mu: RateChoice = None
    level: Optional[float] = None
    _costs: Optional[CostSeries] = field(default=None, repr=False)
    _qseries: Dict[int, QSeries] = field(default_factory=dict, repr=False)

    @property
    def costs(self) -> CostSeries:
        if self._costs is None:
            self._costs = compute_costs(self.log, self.mu)
        return self._costs

    def qseries(self, truncation: Optional[int]) -> QSeries:
        L = default_truncation(self.log) if truncation is None else truncation
        if L not in self._qseries:
            self._qseries[L] = q_forward_sums(self.costs, L)
        return self._qseries[L]


def _naive(ctx: EstimationContext, spec: EstimatorSpec) -> EstimateReport:
    return estimate_naive(ctx.costs, ctx.log, ctx.level)


def _group(ctx: EstimationContext, spec: EstimatorSpec) -> EstimateReport:
    return estimate_group(ctx.costs, ctx.log, ctx.level)


def _switchback(ctx: EstimationContext, spec: EstimatorSpec) -> EstimateReport:
    return estimate_switchback(ctx.costs, ctx.log, spec.window, ctx.level)


def _dq(target: str) -> Callable[[EstimationContext, EstimatorSpec], EstimateReport]:
    def run(ctx: EstimationContext, spec: EstimatorSpec) -> EstimateReport:
        return estimate_dq(ctx.qseries(spec.truncation), ctx.log, target, ctx.level)
    return run


def _mixed(ctx: EstimationContext, spec: EstimatorSpec) -> EstimateReport:
    return estimate_dq_mixed(ctx.qseries(spec.truncation), ctx.log, spec.alpha, ctx.level)


def _doubly_robust(target: str) -> Callable[[EstimationContext, EstimatorSpec], EstimateReport]:
    def run(ctx: EstimationContext, spec: EstimatorSpec) -> EstimateReport:
        return estimate_dq_doubly_robust(
            ctx.qseries(spec.truncation), ctx.costs, ctx.log, target,
            alpha=spec.alpha, level=ctx.level,
        )
    return run


_RUNNERS: Dict[str, Callable[[EstimationContext, EstimatorSpec], EstimateReport]] = {
    "naive": _naive,
    "qDQ": _dq("q"),
    "wDQ": _dq("w"),
    "mixDQ": _mixed,
    "group": _group,
    "switchback": _switchback,
    "qDQ-DR": _doubly_robust("q"),
    "wDQ-DR": _doubly_robust("w"),
    "mixDQ-DR": _doubly_robust("mix"),
}


def as_spec(item: Union[str, EstimatorSpec]) -> EstimatorSpec:
    return item if isinstance(item, EstimatorSpec) else EstimatorSpec(item)


def run_estimator(
    log_or_context: Union[EventLog, EstimationContext],
    spec: Union[str, EstimatorSpec],
) -> EstimateReport:
    """Run one estimator and label its report with the spec's display name."""
    spec = as_spec(spec)
    ctx = log_or_context if isinstance(log_or_context, EstimationContext) else EstimationContext(log_or_context)
    report = _RUNNERS[spec.name](ctx, spec)
    return report.relabel(spec.display_name)


def run_estimators(
    log: EventLog,
    specs: Iterable[Union[str, EstimatorSpec]],
    mu: RateChoice = None,
    level: Optional[float] = None,
) -> Tuple[List[EstimateReport], Dict[str, EstimationError]]:
    """
    Run several estimators on one log.

    Returns:
        Reports in the order given, and the failures keyed by display name
    """
    ctx = EstimationContext(log, mu=mu, level=level)
    reports: List[EstimateReport] = []
    failures: Dict[str, EstimationError] = {}
    for item in specs:
        spec = as_spec(item)
        try:
            reports.append(run_estimator(ctx, spec))
        except EstimationError as e:
            logger.warning(f"Estimator {spec.display_name} failed: {e}")
            failures[spec.display_name] = e
    return reports, failures


def default_estimators(log: EventLog) -> List[EstimatorSpec]:
    """Estimators that apply to the design of ``log``."""
    kind = log.config.design.kind
    if kind == "group":
        return [EstimatorSpec("group")]
    if isinstance(log.config.design, SwitchbackDesign):
        return [EstimatorSpec("switchback")]
    return [EstimatorSpec(name) for name in ("naive", "qDQ", "wDQ", "mixDQ")]
