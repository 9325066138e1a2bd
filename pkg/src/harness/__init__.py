"""Ground truth, replicated experiments and the table catalogue."""

from .plan import ComputedTruth, EstimatorSummary, ExperimentPlan, ReplicationSummary, SuppliedTruth
from .runner import ground_truth_gte, run_experiment, run_replication, summarize
from .tables import TABLES, TableRow, reproduce_table, scaled_size, table_plans, table_rows

__all__ = [
    "ComputedTruth",
    "EstimatorSummary",
    "ExperimentPlan",
    "ReplicationSummary",
    "SuppliedTruth",
    "TABLES",
    "TableRow",
    "ground_truth_gte",
    "reproduce_table",
    "run_experiment",
    "run_replication",
    "scaled_size",
    "summarize",
    "table_plans",
    "table_rows",
]
