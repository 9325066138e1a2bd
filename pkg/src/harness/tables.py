"""
Catalogue of the reference experiment tables.

Every row runs N = 20 servers with p = 0.5 and truncation floor(30 N lambda)
unless the table varies one of them. The reference GTE of each row is kept
as its supplied ground truth. ``reproduce_table`` scales the horizon to
10^6 * scale and the replication count to ceil(100 * scale), never below
the configured floor.
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from config.settings import settings
from ..errors import ConfigInvalid, UnknownTable
from ..estimators.registry import EstimatorSpec
from ..simulation.models import (
    JIQ,
    MJSQ,
    ConstantArrivals,
    DeterministicService,
    ExponentialService,
    ParetoService,
    PowerOfD,
    SimConfig,
    SinusoidalArrivals,
)
from ..utils.logger import logger
from .plan import ComputedTruth, ExperimentPlan, ReplicationSummary, SuppliedTruth
from .runner import run_experiment


N_SERVERS = 20
FULL_HORIZON = 1e6
FULL_REPLICATIONS = 100
DEFAULT_SEED = 20240101

STANDARD = ("naive", "qDQ", "wDQ", "mixDQ")
LAMBDAS = (0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 0.95)


@dataclass(frozen=True)
class TableRow:
    """One row: a label, its full-scale simulation setup and its reference GTE."""
    label: str
    config: SimConfig
    estimators: Tuple[EstimatorSpec, ...]
    gte: float


def _truncation(lam: float, multiplier: float = 30.0) -> int:
    return int(math.floor(multiplier * N_SERVERS * lam))


def _specs(names: Sequence[str], lam: float) -> Tuple[EstimatorSpec, ...]:
    L = _truncation(lam)
    return tuple(EstimatorSpec(name, truncation=L) for name in names)


def _config(lam, control, treatment, arrivals=None, service=None, **extra) -> SimConfig:
    return SimConfig.build(
        n_servers=N_SERVERS,
        arrival_spec=arrivals or ConstantArrivals(rate=lam),
        service_spec=service or ExponentialService(rates=(1.0,) * N_SERVERS),
        control_policy=control,
        treatment_policy=treatment,
        treatment_prob=0.5,
        horizon=FULL_HORIZON,
        seed=DEFAULT_SEED,
        **extra,
    )


def _lambda_rows(
    gtes: Dict[float, float],
    control,
    treatment,
    names: Sequence[str] = STANDARD,
    **extra,
) -> List[TableRow]:
    return [
        TableRow(f"lambda={lam:g}", _config(lam, control, treatment, **extra), _specs(names, lam), gte)
        for lam, gte in gtes.items()
    ]


def _table_1() -> List[TableRow]:
    gtes = {0.7: 0.252, 0.8: 0.358, 0.85: 0.439, 0.9: 0.566, 0.95: 0.797}
    return _lambda_rows(gtes, PowerOfD(d=3), PowerOfD(d=2))


def _table_2() -> List[TableRow]:
    rates = tuple(round(0.90 + 0.01 * i, 2) for i in range(N_SERVERS))
    gtes = {0.85: 0.458, 0.9: 0.595, 0.95: 0.859}
    return _lambda_rows(
        gtes, PowerOfD(d=3), PowerOfD(d=2),
        names=STANDARD + ("group",),
        service=ExponentialService(rates=rates),
    )


def _sinusoidal() -> SinusoidalArrivals:
    return SinusoidalArrivals(base=0.9, amplitude=0.15)


def _table_3() -> List[TableRow]:
    config = _config(0.9, PowerOfD(d=3), PowerOfD(d=2), arrivals=_sinusoidal())
    return [TableRow("lambda=0.9+0.15sin(t)", config, _specs(STANDARD, 0.9), 0.561)]


def _table_4() -> List[TableRow]:
    config = _config(0.9, PowerOfD(d=3), PowerOfD(d=2), arrivals=_sinusoidal())
    specs = tuple(
        EstimatorSpec("switchback", window=float(w), label=f"switchback(t={w})") for w in (10, 50, 100)
    ) + (EstimatorSpec("mixDQ", truncation=_truncation(0.9)),)
    return [TableRow("lambda=0.9+0.15sin(t)", config, specs, 0.561)]


def _table_5() -> List[TableRow]:
    gtes = dict(zip(LAMBDAS, (-0.216, -0.147, -0.080, 0.023, 0.106, 0.233, 0.466)))
    return _lambda_rows(gtes, PowerOfD(d=3), PowerOfD(d=2), delay_enabled=True)


def _table_6() -> List[TableRow]:
    gtes = {0.85: 0.201, 0.9: 0.261, 0.95: 0.375}
    return _lambda_rows(
        gtes, PowerOfD(d=3), PowerOfD(d=2),
        service=DeterministicService(rates=(1.0,) * N_SERVERS),
    )


def _table_7() -> List[TableRow]:
    gtes = {0.9: 0.292, 0.95: 0.418}
    return _lambda_rows(gtes, PowerOfD(d=3), PowerOfD(d=2), service=ParetoService(shape=4.0, scale=0.75))


def _table_8() -> List[TableRow]:
    lam = 0.9
    config = _config(lam, PowerOfD(d=3), PowerOfD(d=2))
    specs = tuple(
        EstimatorSpec(name, truncation=_truncation(lam, m), label=f"{name}(L={m}N*lambda)")
        for m in (10, 30, 60, 100)
        for name in ("qDQ", "wDQ", "mixDQ")
    )
    return [TableRow(f"lambda={lam:g}", config, specs, 0.566)]


def _table_9() -> List[TableRow]:
    gtes = dict(zip(LAMBDAS, (0.092, 0.132, 0.180, 0.246, 0.296, 0.371, 0.499)))
    return _lambda_rows(gtes, PowerOfD(d=5), PowerOfD(d=3))


def _table_10() -> List[TableRow]:
    gtes = dict(zip(LAMBDAS, (0.138, 0.187, 0.252, 0.358, 0.439, 0.566, 0.797)))
    names = ("qDQ", "wDQ", "mixDQ", "qDQ-DR", "wDQ-DR", "mixDQ-DR")
    return _lambda_rows(gtes, PowerOfD(d=3), PowerOfD(d=2), names=names)


def _table_11() -> List[TableRow]:
    gtes = dict(zip(LAMBDAS, (0.178, 0.244, 0.323, 0.421, 0.480, 0.551, 0.646)))
    return _lambda_rows(gtes, MJSQ(r=0.4), MJSQ(r=0.6))


def _table_12() -> List[TableRow]:
    gtes = dict(zip(LAMBDAS, (0.095, 0.174, 0.349, 0.826, 1.447, 3.034, 9.346)))
    return _lambda_rows(gtes, MJSQ(r=0.95), PowerOfD(d=1))


def _table_13() -> List[TableRow]:
    gtes = dict(zip(LAMBDAS, (0.248, 0.307, 0.364, 0.415, 0.433, 0.433, 0.373)))
    return _lambda_rows(gtes, JIQ(d=2), MJSQ(r=0.4))


TABLES: Dict[int, Callable[[], List[TableRow]]] = {
    1: _table_1,
    2: _table_2,
    3: _table_3,
    4: _table_4,
    5: _table_5,
    6: _table_6,
    7: _table_7,
    8: _table_8,
    9: _table_9,
    10: _table_10,
    11: _table_11,
    12: _table_12,
    13: _table_13,
}


def table_rows(table_id: int) -> List[TableRow]:
    if table_id not in TABLES:
        raise UnknownTable(f"table {table_id} is not in the catalogue (1-{max(TABLES)})")
    return TABLES[table_id]()


def scaled_size(scale: float) -> Tuple[float, int]:
    """(horizon, replications) at ``scale``."""
    if not 0.0 < scale <= 1.0:
        raise ConfigInvalid(f"scale must lie in (0, 1], got {scale}")
    horizon = FULL_HORIZON * scale
    replications = max(settings.replication_floor, math.ceil(FULL_REPLICATIONS * scale))
    return horizon, replications


def table_plans(
    table_id: int,
    scale: float,
    ground_truth: str = "supplied",
    seed: Optional[int] = None,
) -> List[ExperimentPlan]:
    """
    Plans for every row of a table.

    Args:
        table_id: Table number
        scale: Fraction of the full horizon and replication count
        ground_truth: ``"supplied"`` for the reference values or ``"compute"``
        seed: Root seed override
    """
    horizon, replications = scaled_size(scale)
    plans = []
    for row in table_rows(table_id):
        changes = {"horizon": horizon}
        if seed is not None:
            changes["seed"] = seed
        config = row.config.replace(**changes)
        if ground_truth == "compute":
            truth = ComputedTruth(
                horizon=settings.ground_truth_horizon,
                replications=settings.ground_truth_replications,
            )
        elif ground_truth == "supplied":
            truth = SuppliedTruth(value=row.gte)
        else:
            raise ConfigInvalid(f"ground_truth must be 'supplied' or 'compute', got '{ground_truth}'")
        plans.append(ExperimentPlan(
            base=config,
            replications=replications,
            estimators=row.estimators,
            ground_truth=truth,
            table=str(table_id),
            row=row.label,
        ))
    return plans


def reproduce_table(
    table_id: int,
    scale: float,
    ground_truth: str = "supplied",
    seed: Optional[int] = None,
    jobs: Optional[int] = None,
) -> List[ReplicationSummary]:
    """Run every row of a catalogued table at ``scale``; one summary per row."""
    plans = table_plans(table_id, scale, ground_truth, seed)
    logger.info(f"Reproducing table {table_id} at scale {scale:g}: {len(plans)} rows")
    return [run_experiment(plan, jobs) for plan in plans]
