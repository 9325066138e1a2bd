"""
Dispatch policies and the treatment coin.

Assignment happens in two steps so the dispatcher-delay mode can fix the
sampled servers at arrival and read their queues later:

1. ``select_targets`` decides which servers will report (and, for MJSQ,
   which branch applies).
2. ``resolve`` reads the current queue lengths and picks the server.

``assign`` runs both steps back to back. Server indices are 0-based here;
the event log stores them 1-based.
"""

from dataclasses import dataclass
from typing import Literal, Sequence, Tuple

from ..errors import SimulationError
from .models import JIQ, MJSQ, PowerOfD
from .rng import RandomStream


Branch = Literal["sample", "random", "jsq", "jiq"]


@dataclass(frozen=True)
class Targets:
    """Servers chosen to report queue lengths for one task."""
    branch: Branch
    servers: Tuple[int, ...]


@dataclass(frozen=True)
class Assignment:
    """
    Outcome of a dispatch decision.

    Attributes:
        observed: Queue lengths the dispatcher recorded
        server: Chosen 0-based server
        assigned_length: Queue length the dispatcher knew for the chosen server
    """
    observed: Tuple[int, ...]
    server: int
    assigned_length: int


def choose_action(p: float, stream: RandomStream) -> int:
    """Treatment (1) with probability ``p``, else control (0); one uniform per call."""
    return 1 if stream.random() < p else 0


def select_targets(policy, eligible: Sequence[int], stream: RandomStream) -> Targets:
    """Pick the reporting servers for ``policy`` among ``eligible``."""
    if isinstance(policy, PowerOfD):
        return Targets("sample", tuple(stream.sample(eligible, policy.d)))
    if isinstance(policy, MJSQ):
        if stream.random() < policy.r:
            return Targets("random", (eligible[stream.below(len(eligible))],))
        return Targets("jsq", tuple(eligible))
    if isinstance(policy, JIQ):
        return Targets("jiq", tuple(stream.sample(eligible, policy.d)))
    raise SimulationError(f"unsupported policy: {policy!r}")


def _shortest(servers: Sequence[int], queues, stream: RandomStream) -> Assignment:
    observed = tuple(queues[i] for i in servers)
    best = min(observed)
    tied = [k for k, q in enumerate(observed) if q == best]
    pick = tied[0] if len(tied) == 1 else tied[stream.below(len(tied))]
    return Assignment(observed=observed, server=servers[pick], assigned_length=best)


def resolve(targets: Targets, queues, eligible: Sequence[int], stream: RandomStream) -> Assignment:
    """
    Read queue lengths and choose a server.

    ``queues[i]`` must return the current length of server ``i``. For JIQ the
    idle check covers every eligible server; when it succeeds the recorded
    observation is the queue length of one eligible server drawn uniformly.
    """
    if targets.branch == "jiq":
        idle = [i for i in eligible if queues[i] == 0]
        if idle:
            server = idle[stream.below(len(idle))]
            sampled = eligible[stream.below(len(eligible))]
            return Assignment(observed=(queues[sampled],), server=server, assigned_length=0)
    return _shortest(targets.servers, queues, stream)


def assign(policy, queues, eligible: Sequence[int], stream: RandomStream) -> Assignment:
    """Select targets and resolve immediately."""
    if not eligible:
        raise SimulationError("no eligible servers")
    return resolve(select_targets(policy, eligible, stream), queues, eligible, stream)
