"""
Configuration settings for the load-balancing A/B testing toolkit.

This module uses Pydantic for settings management, allowing configuration
through environment variables (prefix ``QAB_``), a ``.env`` file, or direct
modification. Experiment descriptions themselves live in config files parsed
by ``src.storage.config_file``; these settings only hold run-wide defaults.
"""

from pathlib import Path
from typing import Optional
from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field


class Settings(BaseSettings):
    """
    Application settings with support for environment variables.

    Attributes:
        output_dir: Directory for logs, reports and summaries
        log_level: Default logging level name
        confidence_level: Level of every reported confidence interval
        truncation_multiplier: Factor c in the automatic truncation L = floor(c * N * lambda)
        csv_significant_digits: Precision of time columns in event-log CSV files
        max_thinning_attempts: Cap on rejected candidates per arrival in the thinning sampler
        rng_buffer_size: Block size for buffered random streams
        ground_truth_horizon: Default horizon of ground-truth runs
        ground_truth_replications: Default replication count of ground-truth runs
        failure_threshold: Share of failed replications that invalidates a summary
        replication_floor: Minimum replication count for table reproduction
        default_jobs: Worker processes for replications (None = all cores)
    """
    model_config = SettingsConfigDict(
        env_prefix="QAB_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    # Output Configuration
    output_dir: Path = Field(
        default=Path("outputs"),
        description="Directory for generated files"
    )
    log_level: str = Field(
        default="INFO",
        pattern=r"(?i)^(debug|info|warning|error|critical)$",
        description="Logging level name"
    )

    # Estimation Configuration
    confidence_level: float = Field(
        default=0.95,
        gt=0.0,
        lt=1.0,
        description="Confidence level for estimator intervals"
    )
    truncation_multiplier: float = Field(
        default=30.0,
        gt=0.0,
        description="Multiplier c in L = floor(c * N * lambda_hat)"
    )

    # Simulation Configuration
    csv_significant_digits: int = Field(
        default=9,
        ge=6,
        le=17,
        description="Significant digits for time columns in event-log CSV"
    )
    max_thinning_attempts: int = Field(
        default=10_000_000,
        ge=1_000_000,
        description="Maximum thinning candidates per accepted arrival"
    )
    rng_buffer_size: int = Field(
        default=4096,
        ge=1,
        description="Number of variates drawn per refill of a random stream"
    )

    # Harness Configuration
    ground_truth_horizon: float = Field(
        default=1e5,
        gt=0.0,
        description="Horizon of each global-control / global-treatment run"
    )
    ground_truth_replications: int = Field(
        default=4,
        ge=1,
        description="Replications per arm for ground-truth runs"
    )
    failure_threshold: float = Field(
        default=0.10,
        ge=0.0,
        lt=1.0,
        description="Failed-replication share above which a summary is invalid"
    )
    replication_floor: int = Field(
        default=10,
        ge=1,
        description="Minimum replications when reproducing a table"
    )
    default_jobs: Optional[int] = Field(
        default=None,
        ge=1,
        description="Parallel worker processes (None = all cores)"
    )

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        # Create directories if they don't exist
        self.output_dir.mkdir(parents=True, exist_ok=True)

settings = Settings()
