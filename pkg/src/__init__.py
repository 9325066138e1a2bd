"""Randomized scheduling-policy experiments on parallel-server queues."""

from .errors import QueueABError
from .simulation import SimConfig, simulate
from .estimators import EstimateReport, EstimatorSpec, run_estimators
from .harness import ExperimentPlan, ReplicationSummary, reproduce_table, run_experiment

__version__ = "1.0.0"

__all__ = [
    "EstimateReport",
    "EstimatorSpec",
    "ExperimentPlan",
    "QueueABError",
    "ReplicationSummary",
    "SimConfig",
    "reproduce_table",
    "run_estimators",
    "run_experiment",
    "simulate",
]
