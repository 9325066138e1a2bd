"""Simulation package: configuration models, random streams and the event engine."""

from .models import (
    ArrivalSpec,
    BernoulliDesign,
    ConstantArrivals,
    DeterministicService,
    ExponentialService,
    GlobalControlDesign,
    GlobalTreatmentDesign,
    GroupDesign,
    JIQ,
    MJSQ,
    ParetoService,
    PolicySpec,
    PowerOfD,
    ServiceSpec,
    SimConfig,
    SinusoidalArrivals,
    SwitchbackDesign,
)
from .event_log import EventLog, TaskRecord
from .engine import Simulator, SystemState, simulate, simulate_with_delay
from .policies import Assignment, assign, choose_action
from .arrivals import next_arrival
from .service import sample_service
from .rng import RandomStream, StreamSet

__all__ = [
    "ArrivalSpec",
    "Assignment",
    "BernoulliDesign",
    "ConstantArrivals",
    "DeterministicService",
    "EventLog",
    "ExponentialService",
    "GlobalControlDesign",
    "GlobalTreatmentDesign",
    "GroupDesign",
    "JIQ",
    "MJSQ",
    "ParetoService",
    "PolicySpec",
    "PowerOfD",
    "RandomStream",
    "ServiceSpec",
    "SimConfig",
    "Simulator",
    "SinusoidalArrivals",
    "StreamSet",
    "SwitchbackDesign",
    "SystemState",
    "TaskRecord",
    "assign",
    "choose_action",
    "next_arrival",
    "sample_service",
    "simulate",
    "simulate_with_delay",
]
