"""Logging and numerical helpers."""

from .logger import setup_logger, logger
from .numerics import exact_mean, exact_sum, sample_covariance, sample_std, sample_variance, sliding_window_sums

__all__ = [
    "exact_mean",
    "exact_sum",
    "sample_covariance",
    "sample_std",
    "sample_variance",
    "setup_logger",
    "sliding_window_sums",
    "logger",
]
