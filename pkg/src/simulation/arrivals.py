"""Arrival epochs: homogeneous Poisson or sinusoidal-rate Poisson by thinning."""

import math

from config.settings import settings
from ..errors import SimulationError
from .models import ConstantArrivals, SinusoidalArrivals
from .rng import RandomStream


def next_arrival(
    clock: float,
    spec,
    n_servers: int,
    arrivals: RandomStream,
    thinning: RandomStream,
) -> float:
    """
    Next arrival epoch strictly after ``clock``.

    Constant arrivals add an Exp(N * rate) gap. Sinusoidal arrivals propose
    candidates at the majorant rate N * (base + amplitude) and accept each with
    probability rate(t) / (base + amplitude); acceptance uniforms come from the
    ``thinning`` stream so the candidate sequence matches the constant case.

    Args:
        clock: Current time (>= 0)
        spec: ConstantArrivals or SinusoidalArrivals
        n_servers: Number of servers N
        arrivals: Stream for exponential gaps
        thinning: Stream for acceptance draws

    Returns:
        The next arrival time
    """
    if isinstance(spec, ConstantArrivals):
        return clock + arrivals.exponential() / (n_servers * spec.rate)

    if isinstance(spec, SinusoidalArrivals):
        peak = spec.base + spec.amplitude
        majorant = n_servers * peak
        t = clock
        for _ in range(settings.max_thinning_attempts):
            t += arrivals.exponential() / majorant
            if thinning.random() * peak <= spec.base + spec.amplitude * math.sin(t):
                return t
        raise SimulationError(
            f"thinning rejected {settings.max_thinning_attempts} candidates after t={clock}"
        )

    raise SimulationError(f"unsupported arrival spec: {spec!r}")
