"""
Discrete-event simulator of N parallel FIFO servers under an experiment design.

Each server keeps the departure epochs of the tasks it holds; because service
is FIFO, a task's departure is fixed the moment it joins. Departures are
applied lazily whenever a queue is read, and a departure at the same instant
as an arrival or release is always applied first. Dispatcher releases (delay
mode) are ordered in a heap keyed by (release time, arrival index).
"""

import heapq
from collections import deque
from dataclasses import dataclass
from typing import Callable, Deque, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import Overflow
from ..utils.logger import logger
from .arrivals import next_arrival
from .event_log import EventLog, observed_offsets_from_lengths
from .models import (
    GlobalControlDesign,
    GlobalTreatmentDesign,
    GroupDesign,
    SimConfig,
    SwitchbackDesign,
)
from .policies import Assignment, Targets, choose_action, resolve, select_targets
from .rng import StreamSet
from .service import sample_service


MAX_QUEUE_LENGTH = 2**32


@dataclass(frozen=True)
class SystemState:
    """Snapshot of queue lengths at an event epoch."""
    clock: float
    queue_lengths: Tuple[int, ...]
    dispatcher_backlog: int = 0

    def occupancy(self, max_level: Optional[int] = None) -> List[float]:
        """s_0..s_k where s_i is the share of servers holding at least i tasks."""
        n = len(self.queue_lengths)
        top = max(self.queue_lengths, default=0) if max_level is None else max_level
        return [sum(1 for q in self.queue_lengths if q >= i) / n for i in range(top + 1)]


class QueueBank:
    """Per-server FIFO queues tracked by pending departure epochs."""

    def __init__(self, n_servers: int):
        self._departures: List[Deque[float]] = [deque() for _ in range(n_servers)]
        self._last_departure = [0.0] * n_servers
        self.clock = 0.0
        self.latest_departure = 0.0

    def __len__(self) -> int:
        return len(self._departures)

    def __getitem__(self, server: int) -> int:
        pending = self._departures[server]
        while pending and pending[0] <= self.clock:
            pending.popleft()
        return len(pending)

    def advance(self, clock: float) -> None:
        self.clock = clock

    def join(self, server: int, service: float) -> float:
        """Enqueue a task at the current clock and return its departure time."""
        start = max(self.clock, self._last_departure[server])
        departure = start + service
        pending = self._departures[server]
        pending.append(departure)
        if len(pending) > MAX_QUEUE_LENGTH:
            raise Overflow(f"server {server + 1} exceeded {MAX_QUEUE_LENGTH} tasks at t={self.clock}")
        self._last_departure[server] = departure
        if departure > self.latest_departure:
            self.latest_departure = departure
        return departure

    def lengths(self) -> Tuple[int, ...]:
        return tuple(self[i] for i in range(len(self)))


@dataclass
class _Pending:
    index: int
    arrival: float
    action: int
    targets: Targets


class Simulator:
    """
    Run one replication of a configured experiment.

    Args:
        config: Validated experiment configuration
        replication: Index used to derive this replication's random streams
        observer: Optional callback receiving a SystemState after every
            arrival or release (used for invariant checks)
    """

    def __init__(
        self,
        config: SimConfig,
        replication: int = 0,
        observer: Optional[Callable[[SystemState], None]] = None,
    ):
        self.config = config
        self.replication = replication
        self.observer = observer
        self.streams = StreamSet.for_replication(config.seed, replication)
        self.queues = QueueBank(config.n_servers)

        everyone = tuple(range(config.n_servers))
        self.partition: Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]] = None
        if isinstance(config.design, GroupDesign):
            order = self.streams.partition.permutation(config.n_servers)
            half = config.n_servers // 2
            self.partition = (tuple(sorted(order[:half])), tuple(sorted(order[half:])))
            self._eligible = self.partition
        else:
            self._eligible = (everyone, everyone)

        self._arrival: List[float] = []
        self._action: List[int] = []
        self._observed: List[Tuple[int, ...]] = []
        self._server: List[int] = []
        self._known: List[int] = []
        self._service: List[float] = []
        self._response: List[float] = []
        self._delay: List[float] = []
        self._backlog: List[int] = []

    # ------------------------------------------------------------------ design

    def _draw_action(self, t: float) -> int:
        design = self.config.design
        if isinstance(design, GlobalControlDesign):
            return 0
        if isinstance(design, GlobalTreatmentDesign):
            return 1
        if isinstance(design, SwitchbackDesign):
            return int(t // design.window) % 2
        return choose_action(self.config.treatment_prob, self.streams.actions)

    def eligible(self, action: int) -> Sequence[int]:
        return self._eligible[action]

    # ------------------------------------------------------------------ recording

    def _open_record(self, t: float, action: int) -> int:
        self._arrival.append(t)
        self._action.append(action)
        self._observed.append(())
        self._server.append(0)
        self._known.append(0)
        self._service.append(0.0)
        self._response.append(0.0)
        self._delay.append(0.0)
        self._backlog.append(0)
        return len(self._arrival) - 1

    def _dispatch(self, j: int, action: int, assignment: Assignment, arrival: float) -> None:
        service = sample_service(self.config.service_for(action), assignment.server, self.streams.service)
        departure = self.queues.join(assignment.server, service)
        self._observed[j] = assignment.observed
        self._server[j] = assignment.server + 1
        self._known[j] = assignment.assigned_length
        self._service[j] = service
        self._response[j] = departure - arrival

    def _notify(self, backlog: int = 0) -> None:
        if self.observer is not None:
            self.observer(SystemState(self.queues.clock, self.queues.lengths(), backlog))

    # ------------------------------------------------------------------ loops

    def run(self) -> EventLog:
        cfg = self.config
        logger.debug(
            f"Simulating N={cfg.n_servers} T={cfg.horizon:g} design={cfg.design.kind} "
            f"delay={'on' if cfg.delay_enabled else 'off'} replication={self.replication}"
        )
        if cfg.delay_enabled:
            self._run_delayed()
        else:
            self._run_instant()
        log = self._build_log()
        logger.info(
            f"Replication {self.replication}: {len(log)} arrivals "
            f"({log.n_treatment} treated), drained at t={log.emptied_at:.6g}"
        )
        return log

    def _run_instant(self) -> None:
        cfg = self.config
        streams = self.streams
        t = next_arrival(0.0, cfg.arrival_spec, cfg.n_servers, streams.arrivals, streams.thinning)
        while t < cfg.horizon:
            self.queues.advance(t)
            action = self._draw_action(t)
            eligible = self._eligible[action]
            targets = select_targets(cfg.policy_for(action), eligible, streams.sampling)
            assignment = resolve(targets, self.queues, eligible, streams.sampling)
            j = self._open_record(t, action)
            self._dispatch(j, action, assignment, t)
            self._notify()
            t = next_arrival(t, cfg.arrival_spec, cfg.n_servers, streams.arrivals, streams.thinning)

    def _release(self, pending: _Pending, release_time: float, held: int) -> None:
        self.queues.advance(release_time)
        eligible = self._eligible[pending.action]
        assignment = resolve(pending.targets, self.queues, eligible, self.streams.sampling)
        self._delay[pending.index] = release_time - pending.arrival
        self._dispatch(pending.index, pending.action, assignment, pending.arrival)
        self._notify(held)

    def _run_delayed(self) -> None:
        cfg = self.config
        streams = self.streams
        held: List[Tuple[float, int, _Pending]] = []
        t = next_arrival(0.0, cfg.arrival_spec, cfg.n_servers, streams.arrivals, streams.thinning)
        while t < cfg.horizon:
            while held and held[0][0] <= t:
                release_time, _, pending = heapq.heappop(held)
                self._release(pending, release_time, len(held))
            self.queues.advance(t)
            action = self._draw_action(t)
            eligible = self._eligible[action]
            targets = select_targets(cfg.policy_for(action), eligible, streams.sampling)
            delay = max(streams.delay.exponential() for _ in targets.servers)
            j = self._open_record(t, action)
            self._backlog[j] = len(held)
            heapq.heappush(held, (t + delay, j, _Pending(j, t, action, targets)))
            self._notify(len(held))
            t = next_arrival(t, cfg.arrival_spec, cfg.n_servers, streams.arrivals, streams.thinning)
        while held:
            release_time, _, pending = heapq.heappop(held)
            self._release(pending, release_time, len(held))

    def _build_log(self) -> EventLog:
        cfg = self.config
        observed = self._observed
        lengths = [len(o) for o in observed]
        flat = np.fromiter((q for o in observed for q in o), dtype=np.int64, count=sum(lengths))
        partition = None
        if self.partition is not None:
            partition = tuple(tuple(i + 1 for i in half) for half in self.partition)
        return EventLog(
            config=cfg,
            horizon=cfg.horizon,
            arrival_time=np.asarray(self._arrival, dtype=np.float64),
            action=np.asarray(self._action, dtype=np.int64),
            observed_flat=flat,
            observed_offsets=observed_offsets_from_lengths(lengths),
            assigned_server=np.asarray(self._server, dtype=np.int64),
            assigned_length=np.asarray(self._known, dtype=np.int64),
            service_duration=np.asarray(self._service, dtype=np.float64),
            response_time=np.asarray(self._response, dtype=np.float64),
            dispatcher_delay=np.asarray(self._delay, dtype=np.float64),
            dispatcher_backlog=np.asarray(self._backlog, dtype=np.int64),
            group_partition=partition,
            emptied_at=max(cfg.horizon, self.queues.latest_departure),
            replication=self.replication,
        )


def simulate(config: SimConfig, replication: int = 0) -> EventLog:
    """Run ``config`` from an empty system and return its event log."""
    return Simulator(config, replication).run()


def simulate_with_delay(config: SimConfig, replication: int = 0) -> EventLog:
    """
    Run ``config`` with tasks held at the dispatcher until their targets report.

    The delay of a task is the maximum of one Exp(1) draw per reporting server;
    queue lengths are read at release time. Delay mode is switched on if
    ``config`` leaves it off.
    """
    if not config.delay_enabled:
        config = config.replace(delay_enabled=True)
    return Simulator(config, replication).run()
