"""Service-time sampling."""

from ..errors import SimulationError
from .models import DeterministicService, ExponentialService, ParetoService
from .rng import RandomStream


def sample_service(spec, server: int, stream: RandomStream) -> float:
    """
    Draw one service duration for 0-based ``server``.

    Exponential specs draw Exp(mu_server), deterministic specs return exactly
    1 / mu_server, and Pareto specs invert the CDF: scale * (1 - U) ** (-1 / shape).
    """
    if isinstance(spec, ExponentialService):
        return stream.exponential() / spec.rates[server]
    if isinstance(spec, DeterministicService):
        return 1.0 / spec.rates[server]
    if isinstance(spec, ParetoService):
        return spec.scale * (1.0 - stream.random()) ** (-1.0 / spec.shape)
    raise SimulationError(f"unsupported service spec: {spec!r}")
