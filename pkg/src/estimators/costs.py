"""
Observable per-task costs, arrival-rate and service-rate estimates.

Response-time cost of task j is (l + 1) / mu of its assigned server, where l
is the queue length the dispatcher knew for that server; queue-length cost is
the mean of the observed queue lengths. In delay mode the dispatcher delay is
added to the first and backlog / N to the second.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
import numpy.typing as npt

from config.settings import settings
from ..errors import ArmEmpty, MissingObservation, NoSamples, TruncationTooLong
from ..simulation.event_log import EventLog
from ..utils.numerics import exact_sum


FloatArray = npt.NDArray[np.float64]
RateChoice = Union[None, str, Sequence[float]]


@dataclass(frozen=True)
class CostSeries:
    """Per-task response-time and queue-length costs."""
    cost_w: FloatArray
    cost_q: FloatArray
    delay_adjusted: bool = False

    def __len__(self) -> int:
        return int(self.cost_w.shape[0])


def estimate_lambda(log: EventLog) -> float:
    """Per-server arrival rate (n_C + n_T) / (N * T)."""
    return len(log) / (log.n_servers * log.horizon)


def estimate_mu(log: EventLog) -> FloatArray:
    """
    Service-rate estimates from completed tasks.

    mu_i = sum(l + 1) / sum(w) over tasks assigned to server i, where w is the
    time spent after release from the dispatcher.

    Raises:
        NoSamples: If some server never received a task
    """
    n = log.n_servers
    servers = log.assigned_server - 1
    work = (log.assigned_length + 1).astype(np.float64)
    sojourn = log.response_time - log.dispatcher_delay
    mu = np.empty(n, dtype=np.float64)
    for i in range(n):
        mask = servers == i
        if not np.any(mask):
            raise NoSamples(i + 1)
        mu[i] = exact_sum(work[mask]) / exact_sum(sojourn[mask])
    return mu


def _configured_rates(log: EventLog) -> FloatArray:
    """Per-task rate of the assigned server under the task's own arm."""
    cfg = log.config
    n = cfg.n_servers
    control = np.array([cfg.service_for(0).rate(i) for i in range(n)], dtype=np.float64)
    treatment = np.array([cfg.service_for(1).rate(i) for i in range(n)], dtype=np.float64)
    servers = log.assigned_server - 1
    return np.where(log.action == 1, treatment[servers], control[servers])


def compute_costs(log: EventLog, mu: RateChoice = None) -> CostSeries:
    """
    Build the cost series of ``log``.

    Args:
        log: Event log
        mu: None for the configured rates, ``"estimated"`` to use
            ``estimate_mu``, or a length-N vector of known rates

    Returns:
        CostSeries aligned with the log's records

    Raises:
        MissingObservation: If a record has an empty observed vector
    """
    lengths = log.observed_lengths
    if len(log) and lengths.min() == 0:
        j = int(np.argmin(lengths))
        raise MissingObservation(f"record {j} has no observed queue lengths")

    if mu is None:
        rates = _configured_rates(log)
    else:
        vector = estimate_mu(log) if isinstance(mu, str) else np.asarray(mu, dtype=np.float64)
        if vector.shape != (log.n_servers,):
            raise ValueError(f"mu must have length {log.n_servers}")
        rates = vector[log.assigned_server - 1]

    cost_w = (log.assigned_length + 1) / rates
    if len(log):
        sums = np.add.reduceat(log.observed_flat, log.observed_offsets[:-1]).astype(np.float64)
        cost_q = sums / lengths
    else:
        cost_q = np.zeros(0, dtype=np.float64)

    delayed = log.config.delay_enabled
    if delayed:
        cost_w = cost_w + log.dispatcher_delay
        cost_q = cost_q + log.dispatcher_backlog / log.n_servers
    return CostSeries(cost_w=cost_w.astype(np.float64), cost_q=cost_q, delay_adjusted=delayed)


def default_truncation(log: EventLog, multiplier: Optional[float] = None) -> int:
    """floor(c * N * lambda_hat) with c from settings unless given."""
    c = settings.truncation_multiplier if multiplier is None else multiplier
    return int(math.floor(c * log.n_servers * estimate_lambda(log)))


def check_truncation(n_records: int, truncation: int) -> None:
    if truncation < 0:
        raise TruncationTooLong(f"truncation must be non-negative, got {truncation}")
    if truncation >= n_records:
        raise TruncationTooLong(f"truncation {truncation} leaves no eligible task among {n_records}")


def arm_masks(actions: np.ndarray, minimum: int = 1):
    """Boolean masks of treatment and control tasks, each with at least ``minimum`` members."""
    treated = actions == 1
    control = ~treated
    n_t = int(np.count_nonzero(treated))
    n_c = int(actions.shape[0] - n_t)
    if n_t < minimum or n_c < minimum:
        raise ArmEmpty(f"arms have n_C={n_c}, n_T={n_t}; need at least {minimum} each")
    return treated, control
