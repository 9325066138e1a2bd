"""Experiment plans and replication summaries."""

from dataclasses import dataclass, field
from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..errors import ConfigInvalid
from ..estimators.registry import EstimatorSpec
from ..simulation.models import SimConfig, first_error


class SuppliedTruth(BaseModel):
    """A ground-truth GTE known in advance."""
    model_config = ConfigDict(frozen=True, extra="forbid")
    kind: Literal["supplied"] = "supplied"
    value: float
    std_error: float = 0.0


class ComputedTruth(BaseModel):
    """Ground truth from long global-control and global-treatment runs."""
    model_config = ConfigDict(frozen=True, extra="forbid")
    kind: Literal["compute"] = "compute"
    horizon: float = Field(gt=0.0)
    replications: int = Field(ge=1)


GroundTruthSpec = Annotated[Union[SuppliedTruth, ComputedTruth], Field(discriminator="kind")]


class ExperimentPlan(BaseModel):
    """
    A replicated experiment.

    Attributes:
        base: Configuration of every replication; its seed is the root seed
        replications: Number of independent replications R
        estimators: Estimators applied to each replication's log
        ground_truth: Supplied value or computed reference
        estimate_mu: Use estimated service rates in the costs
        table: Table label carried into the summary
        row: Row label carried into the summary
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    base: SimConfig
    replications: int = Field(ge=1)
    estimators: Tuple[EstimatorSpec, ...] = Field(min_length=1)
    ground_truth: GroundTruthSpec
    estimate_mu: bool = False
    table: str = "experiment"
    row: str = "1"

    @field_validator("estimators", mode="before")
    @classmethod
    def _names_to_specs(cls, value):
        return tuple(EstimatorSpec(v) if isinstance(v, str) else v for v in value)

    @classmethod
    def build(cls, **fields) -> "ExperimentPlan":
        try:
            return cls.model_validate(fields)
        except ValidationError as exc:
            raise ConfigInvalid(first_error(exc)) from exc


@dataclass(frozen=True)
class EstimatorSummary:
    """Replication statistics of one estimator; ``std_dev`` is None for a single replication."""
    estimator: str
    mean: float
    std_dev: Optional[float]
    mse: float
    replications: int
    failures: int = 0


@dataclass
class ReplicationSummary:
    """
    Aggregated result of one experiment plan.

    Attributes:
        table: Table label
        row: Row label
        ground_truth: Reference GTE
        gt_se: Standard error of the reference
        estimators: Per-estimator statistics in plan order
        replications: Planned replications
        failed_replications: Replications where simulation or some estimator failed
        invalid: True when the failed share exceeds the configured threshold
        failures: Error messages keyed by (replication, estimator)
        wall_time: Seconds spent running the plan
    """
    table: str
    row: str
    ground_truth: float
    gt_se: float
    estimators: List[EstimatorSummary]
    replications: int
    failed_replications: int = 0
    invalid: bool = False
    failures: Dict[Tuple[int, str], str] = field(default_factory=dict)
    wall_time: float = 0.0

    def get(self, estimator: str) -> EstimatorSummary:
        for item in self.estimators:
            if item.estimator == estimator:
                return item
        raise KeyError(estimator)
