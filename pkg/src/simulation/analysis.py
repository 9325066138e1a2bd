"""
Sample-path statistics of an event log.

These functions rebuild the number-in-system path from arrival, join and
departure epochs by sorting them, so they check the simulator rather than
restate it.
"""

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..utils.numerics import exact_mean, exact_sum
from .event_log import EventLog


@dataclass(frozen=True)
class LittleLawTerms:
    """Time-average number in system L, arrival rate and mean response time over [0, horizon]."""
    horizon: float
    mean_in_system: float
    arrival_rate: float
    mean_response: float

    @property
    def gap(self) -> float:
        """|L - lambda * W|."""
        return abs(self.mean_in_system - self.arrival_rate * self.mean_response)


def _path_integral(starts: np.ndarray, ends: np.ndarray, until: float) -> float:
    """Integral over [0, until] of the number of intervals [start, end) covering t."""
    times = np.concatenate([starts, ends])
    steps = np.concatenate([np.ones_like(starts), -np.ones_like(ends)])
    order = np.lexsort((steps, times))
    times = np.minimum(times[order], until)
    counts = np.cumsum(steps[order])
    if counts.size and counts.min() < 0:
        raise AssertionError("number in system went negative")
    widths = np.diff(np.append(times, until))
    return exact_sum(counts * widths)


def in_system_integral(log: EventLog, until: Optional[float] = None) -> float:
    """Integral of the total number of tasks (dispatcher included) over [0, until]."""
    until = log.emptied_at if until is None else until
    return _path_integral(log.arrival_time, log.departure_time(), until)


def time_average_in_system(log: EventLog, until: Optional[float] = None) -> float:
    until = log.emptied_at if until is None else until
    return in_system_integral(log, until) / until


def little_law_terms(log: EventLog) -> LittleLawTerms:
    """Little's-law quantities over [0, emptied_at]."""
    horizon = log.emptied_at
    n = len(log)
    return LittleLawTerms(
        horizon=horizon,
        mean_in_system=in_system_integral(log, horizon) / horizon,
        arrival_rate=n / horizon,
        mean_response=exact_mean(log.response_time) if n else 0.0,
    )


def departures_by(log: EventLog, t: float) -> int:
    return int(np.count_nonzero(log.departure_time() <= t))


def time_average_occupancy(log: EventLog, max_level: int, until: Optional[float] = None) -> List[float]:
    """
    Time-average occupancy s_0..s_max_level over [0, until].

    A task occupies its server from release (arrival plus dispatcher delay) to
    departure.
    """
    until = log.horizon if until is None else until
    n = log.n_servers
    joins = log.arrival_time + log.dispatcher_delay
    departures = log.departure_time()
    servers = log.assigned_server
    at_least = [0.0] * (max_level + 1)
    at_least[0] = until * n
    for server in range(1, n + 1):
        mask = servers == server
        if not np.any(mask):
            continue
        times = np.concatenate([joins[mask], departures[mask]])
        steps = np.concatenate([np.ones(mask.sum()), -np.ones(mask.sum())])
        order = np.lexsort((steps, times))
        times = np.minimum(times[order], until)
        counts = np.cumsum(steps[order])
        widths = np.diff(np.append(times, until))
        for level in range(1, max_level + 1):
            at_least[level] += exact_sum(widths[counts >= level])
    return [value / (until * n) for value in at_least]


def mean_field_occupancy(lam: float, d: int, max_level: int) -> List[float]:
    """Fixed point of the power-of-d supermarket model: s_i = lam ** ((d**i - 1) / (d - 1))."""
    if d == 1:
        return [lam ** i for i in range(max_level + 1)]
    return [lam ** ((d ** i - 1) / (d - 1)) for i in range(max_level + 1)]


def mm1_mean_in_system(lam: float, mu: float = 1.0) -> float:
    rho = lam / mu
    return rho / (1.0 - rho)


def mm1_mean_response(lam: float, mu: float = 1.0) -> float:
    return 1.0 / (mu - lam)


def is_nonincreasing(values: List[float], tol: float = 0.0) -> bool:
    return all(b <= a + tol for a, b in zip(values, values[1:])) and math.isclose(values[0], 1.0)
