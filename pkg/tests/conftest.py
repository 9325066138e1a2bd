"""Shared fixtures: small configurations and hand-built event logs."""

from typing import Optional, Sequence

import numpy as np
import pytest

from src.simulation.event_log import EventLog, observed_offsets_from_lengths
from src.simulation.models import (
    BernoulliDesign,
    ConstantArrivals,
    ExponentialService,
    PowerOfD,
    SimConfig,
)


def build_config(n_servers: int = 4, lam: float = 0.7, horizon: float = 200.0, **overrides) -> SimConfig:
    fields = dict(
        n_servers=n_servers,
        arrival_spec=ConstantArrivals(rate=lam),
        service_spec=ExponentialService(rates=(1.0,) * n_servers),
        control_policy=PowerOfD(d=2),
        treatment_policy=PowerOfD(d=1),
        treatment_prob=0.5,
        horizon=horizon,
        design=BernoulliDesign(),
        seed=7,
    )
    fields.update(overrides)
    return SimConfig.build(**fields)


def build_log(
    config: SimConfig,
    actions: Sequence[int],
    observed: Sequence[Sequence[int]],
    servers: Sequence[int],
    assigned_length: Optional[Sequence[int]] = None,
    response_time: Optional[Sequence[float]] = None,
    arrival_time: Optional[Sequence[float]] = None,
    dispatcher_delay: Optional[Sequence[float]] = None,
    dispatcher_backlog: Optional[Sequence[int]] = None,
) -> EventLog:
    """EventLog from explicit columns; unspecified columns get simple defaults."""
    n = len(actions)
    if arrival_time is None:
        arrival_time = np.linspace(0.0, config.horizon, n, endpoint=False)
    if assigned_length is None:
        assigned_length = [min(obs) for obs in observed]
    if response_time is None:
        response_time = [float(l + 1) for l in assigned_length]
    lengths = [len(obs) for obs in observed]
    return EventLog(
        config=config,
        horizon=config.horizon,
        arrival_time=np.asarray(arrival_time, dtype=np.float64),
        action=np.asarray(actions, dtype=np.int64),
        observed_flat=np.asarray([q for obs in observed for q in obs], dtype=np.int64),
        observed_offsets=observed_offsets_from_lengths(lengths),
        assigned_server=np.asarray(servers, dtype=np.int64),
        assigned_length=np.asarray(assigned_length, dtype=np.int64),
        service_duration=np.ones(n, dtype=np.float64),
        response_time=np.asarray(response_time, dtype=np.float64),
        dispatcher_delay=np.zeros(n) if dispatcher_delay is None else np.asarray(dispatcher_delay, dtype=np.float64),
        dispatcher_backlog=np.zeros(n, dtype=np.int64) if dispatcher_backlog is None else np.asarray(dispatcher_backlog, dtype=np.int64),
        emptied_at=config.horizon,
    )


@pytest.fixture
def make_config():
    return build_config


@pytest.fixture
def make_log():
    return build_log


@pytest.fixture
def small_config():
    return build_config()


@pytest.fixture(scope="session")
def bernoulli_log():
    """A moderately long power-of-2 vs power-of-1 Bernoulli log."""
    from src.simulation import simulate
    return simulate(build_config(n_servers=6, lam=0.8, horizon=2000.0, seed=11))
