"""Config files and CSV codecs."""

from .config_file import format_config, parse_config, read_pairs
from .csv_io import (
    meta_path,
    read_estimates,
    read_event_log,
    read_summaries,
    summary_metadata,
    write_estimates,
    write_event_log,
    write_summaries,
)

__all__ = [
    "format_config",
    "meta_path",
    "parse_config",
    "read_estimates",
    "read_event_log",
    "read_pairs",
    "read_summaries",
    "summary_metadata",
    "write_estimates",
    "write_event_log",
    "write_summaries",
]
