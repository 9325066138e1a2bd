"""
Replication runner.

Replications are independent: replication r simulates with streams derived
from (root seed, r) and returns plain floats, so worker processes can run
them in any order. Results are sorted by replication index before any
reduction and reduced with exact sums, so the summary does not depend on
the number of workers.
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, TypeVar

from config.settings import settings
from ..errors import ConfigInvalid, QueueABError
from ..estimators.registry import EstimationContext, EstimatorSpec, run_estimator
from ..simulation.engine import simulate
from ..simulation.event_log import EventLog
from ..simulation.models import GlobalControlDesign, GlobalTreatmentDesign, SimConfig
from ..utils.logger import logger
from ..utils.numerics import exact_mean, sample_std
from .plan import ComputedTruth, EstimatorSummary, ExperimentPlan, ReplicationSummary


T = TypeVar("T")
R = TypeVar("R")

# Ground-truth runs draw from replication indices far above any experiment's
GROUND_TRUTH_OFFSET = 1 << 40


@dataclass
class ReplicationResult:
    replication: int
    estimates: Dict[str, float] = field(default_factory=dict)
    failures: Dict[str, str] = field(default_factory=dict)


def parallel_map(func: Callable[[T], R], items: Sequence[T], jobs: Optional[int] = None) -> List[R]:
    """``map`` over a process pool; ``jobs == 1`` runs in-process."""
    jobs = settings.default_jobs if jobs is None else jobs
    if jobs == 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


# ---------------- Ground truth -----------------

def _global_mean_response(args: Tuple[SimConfig, int]) -> float:
    config, replication = args
    log = simulate(config, GROUND_TRUTH_OFFSET + replication)
    if not len(log):
        raise ConfigInvalid("ground-truth run produced no arrivals; increase the horizon")
    return exact_mean(log.response_time)


def ground_truth_gte(
    config: SimConfig,
    horizon: Optional[float] = None,
    reps: Optional[int] = None,
    jobs: Optional[int] = None,
) -> Tuple[float, float]:
    """
    Global treatment effect from full-treatment and full-control runs.

    Each replication r runs GlobalTreatment and GlobalControl on independent
    streams and contributes the difference of their mean actual response
    times. Returns the mean difference and its standard error (NaN for a
    single replication).
    """
    horizon = settings.ground_truth_horizon if horizon is None else horizon
    reps = settings.ground_truth_replications if reps is None else reps
    if reps < 1:
        raise ConfigInvalid("ground truth needs at least one replication")
    treated = config.replace(design=GlobalTreatmentDesign(), horizon=horizon)
    control = config.replace(design=GlobalControlDesign(), horizon=horizon)
    jobs_list = []
    for r in range(reps):
        jobs_list.append((treated, 2 * r + 1))
        jobs_list.append((control, 2 * r))
    means = parallel_map(_global_mean_response, jobs_list, jobs)
    differences = [means[2 * r] - means[2 * r + 1] for r in range(reps)]
    value = exact_mean(differences)
    sd = sample_std(differences)
    se = math.nan if sd is None else sd / math.sqrt(reps)
    logger.info(f"Ground truth over {reps} replications at T={horizon:g}: {value:.4f} (SE {se:.4f})")
    return value, se


# ---------------- Replications -----------------

def _logs_for(plan: ExperimentPlan, replication: int) -> Iterable[Tuple[EventLog, List[EstimatorSpec]]]:
    """One log per distinct design the plan's estimators read."""
    by_design: Dict[str, Tuple[object, List[EstimatorSpec]]] = {}
    for spec in plan.estimators:
        design = spec.design_for(plan.base.design)
        key = design.model_dump_json()
        by_design.setdefault(key, (design, []))[1].append(spec)
    for design, specs in by_design.values():
        config = plan.base if design == plan.base.design else plan.base.replace(design=design)
        yield simulate(config, replication), specs


def run_replication(args: Tuple[ExperimentPlan, int]) -> ReplicationResult:
    """Simulate one replication and run every estimator of the plan on it."""
    plan, replication = args
    result = ReplicationResult(replication)
    mu = "estimated" if plan.estimate_mu else None
    try:
        for log, specs in _logs_for(plan, replication):
            ctx = EstimationContext(log, mu=mu)
            for spec in specs:
                try:
                    result.estimates[spec.display_name] = run_estimator(ctx, spec).point_estimate
                except QueueABError as e:
                    logger.warning(f"Replication {replication}: {spec.display_name} failed: {e}")
                    result.failures[spec.display_name] = f"{type(e).__name__}: {e}"
    except QueueABError as e:
        logger.warning(f"Replication {replication}: simulation failed: {e}")
        for spec in plan.estimators:
            result.failures.setdefault(spec.display_name, f"{type(e).__name__}: {e}")
    logger.debug(f"Replication {replication}: {len(result.estimates)} estimates, {len(result.failures)} failures")
    return result


def summarize(
    plan: ExperimentPlan,
    results: Iterable[ReplicationResult],
    ground_truth: float,
    gt_se: float,
) -> ReplicationSummary:
    """Aggregate replication results into per-estimator mean, std dev and MSE."""
    ordered = sorted(results, key=lambda r: r.replication)
    rows: List[EstimatorSummary] = []
    for spec in plan.estimators:
        name = spec.display_name
        values = [r.estimates[name] for r in ordered if name in r.estimates]
        failures = sum(1 for r in ordered if name in r.failures)
        if values:
            mean = exact_mean(values)
            mse = exact_mean([(v - ground_truth) ** 2 for v in values])
        else:
            mean = mse = math.nan
        rows.append(EstimatorSummary(
            estimator=name,
            mean=mean,
            std_dev=sample_std(values),
            mse=mse,
            replications=len(values),
            failures=failures,
        ))

    failures = {(r.replication, name): msg for r in ordered for name, msg in r.failures.items()}
    failed = sum(1 for r in ordered if r.failures)
    invalid = failed > settings.failure_threshold * plan.replications
    if invalid:
        logger.error(f"{plan.table} row {plan.row}: {failed} of {plan.replications} replications failed")
    elif failed:
        logger.warning(f"{plan.table} row {plan.row}: {failed} replications had estimator failures")
    return ReplicationSummary(
        table=plan.table,
        row=plan.row,
        ground_truth=ground_truth,
        gt_se=gt_se,
        estimators=rows,
        replications=plan.replications,
        failed_replications=failed,
        invalid=invalid,
        failures=failures,
    )


def resolve_ground_truth(plan: ExperimentPlan, jobs: Optional[int] = None) -> Tuple[float, float]:
    truth = plan.ground_truth
    if isinstance(truth, ComputedTruth):
        return ground_truth_gte(plan.base, truth.horizon, truth.replications, jobs)
    return truth.value, truth.std_error


def run_experiment(plan: ExperimentPlan, jobs: Optional[int] = None) -> ReplicationSummary:
    """
    Run every replication of ``plan`` and aggregate the estimates.

    Estimator failures are recorded per replication; the summary is flagged
    invalid when more than the configured share of replications failed.
    """
    started = time.perf_counter()
    ground_truth, gt_se = resolve_ground_truth(plan, jobs)
    logger.info(f"Running {plan.table} row {plan.row}: {plan.replications} replications, T={plan.base.horizon:g}")
    results = parallel_map(run_replication, [(plan, r) for r in range(plan.replications)], jobs)
    summary = summarize(plan, results, ground_truth, gt_se)
    summary.wall_time = time.perf_counter() - started
    return summary
