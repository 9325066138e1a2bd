"""
Columnar event log produced by the simulator.

The log stores one numpy array per observation field and a CSR encoding
(``observed_flat`` + ``observed_offsets``) of the variable-length observed
queue vectors. ``TaskRecord`` objects are built on demand.
"""

from dataclasses import dataclass, field
from typing import Iterator, Optional, Tuple

import numpy as np
import numpy.typing as npt

from ..errors import SimulationError
from .models import GlobalControlDesign, GlobalTreatmentDesign, SimConfig


FloatArray = npt.NDArray[np.float64]
IntArray = npt.NDArray[np.int64]


@dataclass(frozen=True)
class TaskRecord:
    """Observation tuple of one arrival."""
    index: int
    arrival_time: float
    action: int
    observed: Tuple[int, ...]
    assigned_server: int
    service_duration: float
    response_time: float
    dispatcher_delay: float
    dispatcher_backlog: int
    assigned_length: int


@dataclass(frozen=True, eq=False)
class EventLog:
    """
    Ordered task records of one simulated experiment.

    Attributes:
        config: Configuration that produced the log
        horizon: T; all arrivals satisfy arrival_time < T
        arrival_time: t_j
        action: a_j (0 control, 1 treatment)
        observed_flat: Concatenated observed queue lengths
        observed_offsets: Record j's observations are observed_flat[offsets[j]:offsets[j+1]]
        assigned_server: 1-based server index
        assigned_length: Queue length known for the assigned server at decision time
        service_duration: Service requirement of the task
        response_time: Departure minus arrival (dispatcher delay included)
        dispatcher_delay: Time held at the dispatcher
        dispatcher_backlog: Tasks held at the dispatcher when this one arrived
        group_partition: 1-based (control half, treatment half) for the group design
        emptied_at: First instant >= T at which the system is empty
        replication: Replication index the streams were derived from
    """
    config: SimConfig
    horizon: float
    arrival_time: FloatArray
    action: IntArray
    observed_flat: IntArray
    observed_offsets: IntArray
    assigned_server: IntArray
    assigned_length: IntArray
    service_duration: FloatArray
    response_time: FloatArray
    dispatcher_delay: FloatArray
    dispatcher_backlog: IntArray
    group_partition: Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]] = None
    emptied_at: Optional[float] = None
    replication: int = 0
    _observed_lengths: IntArray = field(init=False, repr=False)

    def __post_init__(self):
        n = self.arrival_time.shape[0]
        columns = (
            self.action, self.assigned_server, self.assigned_length, self.service_duration,
            self.response_time, self.dispatcher_delay, self.dispatcher_backlog,
        )
        if any(col.shape[0] != n for col in columns) or self.observed_offsets.shape[0] != n + 1:
            raise SimulationError("event log columns have mismatched lengths")
        if n > 1 and not np.all(np.diff(self.arrival_time) >= 0):
            raise SimulationError("event log arrival times are not in order")
        for arr in (*columns, self.arrival_time, self.observed_flat, self.observed_offsets):
            arr.setflags(write=False)
        object.__setattr__(self, "_observed_lengths", np.diff(self.observed_offsets))

    def __len__(self) -> int:
        return int(self.arrival_time.shape[0])

    def __iter__(self) -> Iterator[TaskRecord]:
        for j in range(len(self)):
            yield self.record(j)

    @property
    def n_servers(self) -> int:
        return self.config.n_servers

    @property
    def n_treatment(self) -> int:
        return int(np.count_nonzero(self.action))

    @property
    def n_control(self) -> int:
        return len(self) - self.n_treatment

    @property
    def observed_lengths(self) -> IntArray:
        return self._observed_lengths

    def observed(self, j: int) -> Tuple[int, ...]:
        lo, hi = self.observed_offsets[j], self.observed_offsets[j + 1]
        return tuple(int(v) for v in self.observed_flat[lo:hi])

    def record(self, j: int) -> TaskRecord:
        return TaskRecord(
            index=j,
            arrival_time=float(self.arrival_time[j]),
            action=int(self.action[j]),
            observed=self.observed(j),
            assigned_server=int(self.assigned_server[j]),
            service_duration=float(self.service_duration[j]),
            response_time=float(self.response_time[j]),
            dispatcher_delay=float(self.dispatcher_delay[j]),
            dispatcher_backlog=int(self.dispatcher_backlog[j]),
            assigned_length=int(self.assigned_length[j]),
        )

    def departure_time(self) -> FloatArray:
        return self.arrival_time + self.response_time

    def swap_arms(self) -> "EventLog":
        """The same sample path with control and treatment labels exchanged."""
        cfg = self.config
        design = cfg.design
        if isinstance(design, GlobalControlDesign):
            design = GlobalTreatmentDesign()
        elif isinstance(design, GlobalTreatmentDesign):
            design = GlobalControlDesign()
        service, treatment_service = cfg.service_spec, cfg.treatment_service_spec
        if treatment_service is not None:
            service, treatment_service = treatment_service, service
        swapped = cfg.replace(
            control_policy=cfg.treatment_policy,
            treatment_policy=cfg.control_policy,
            treatment_prob=1.0 - cfg.treatment_prob,
            design=design,
            service_spec=service,
            treatment_service_spec=treatment_service,
        )
        partition = None
        if self.group_partition is not None:
            partition = (self.group_partition[1], self.group_partition[0])
        return EventLog(
            config=swapped,
            horizon=self.horizon,
            arrival_time=self.arrival_time,
            action=(1 - self.action).astype(np.int64),
            observed_flat=self.observed_flat,
            observed_offsets=self.observed_offsets,
            assigned_server=self.assigned_server,
            assigned_length=self.assigned_length,
            service_duration=self.service_duration,
            response_time=self.response_time,
            dispatcher_delay=self.dispatcher_delay,
            dispatcher_backlog=self.dispatcher_backlog,
            group_partition=partition,
            emptied_at=self.emptied_at,
            replication=self.replication,
        )


def observed_offsets_from_lengths(lengths) -> IntArray:
    offsets = np.zeros(len(lengths) + 1, dtype=np.int64)
    np.cumsum(np.asarray(lengths, dtype=np.int64), out=offsets[1:])
    return offsets
