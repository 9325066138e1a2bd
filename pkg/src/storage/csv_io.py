"""
CSV codecs for event logs, estimate reports and replication summaries.

Every CSV written here has a ``<name>.meta`` sidecar of ``key = value`` lines.
For event logs the sidecar holds the full configuration in config-file syntax
so that ``read_event_log`` can rebuild the ``EventLog`` without other input.
"""

import json
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from config.settings import settings
from ..errors import ConfigInvalid, ConfigParseError
from ..estimators.reports import EstimateReport
from ..harness.plan import ExperimentPlan, ReplicationSummary
from ..simulation.event_log import EventLog, observed_offsets_from_lengths
from ..utils.logger import logger
from .config_file import KNOWN_KEYS, format_config, parse_config, read_pairs


PathLike = Union[str, Path]

EVENT_LOG_COLUMNS = [
    "index",
    "arrival_time",
    "action",
    "observed",
    "assigned_server",
    "service_duration",
    "response_time",
    "dispatcher_delay",
    "dispatcher_backlog",
    "assigned_length",
]
ESTIMATE_COLUMNS = ["estimator", "estimate", "std_error", "ci_low", "ci_high", "alpha_hat", "lambda_hat"]
SUMMARY_COLUMNS = ["table", "row", "estimator", "mean", "std_dev", "mse", "ground_truth", "gt_se", "replications"]

LOG_META_KEYS = ("replication", "n_control", "n_treatment", "emptied_at", "group_partition")

# Round-trip precision for estimates and summaries
EXACT_FORMAT = "%.17g"


def meta_path(path: PathLike) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta")


def _write_lines(path: Path, lines: Iterable[str]) -> None:
    path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8", newline="\n")


def _write_frame(frame: pd.DataFrame, path: Path, float_format: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=float_format, lineterminator="\n", encoding="utf-8")


# ---------------- Event logs -----------------

def _format_partition(partition: Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]) -> str:
    if partition is None:
        return "none"
    return "|".join(",".join(str(s) for s in half) for half in partition)


def _parse_partition(text: str) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    if text == "none":
        return None
    control, treatment = text.split("|")
    return tuple(int(s) for s in control.split(",")), tuple(int(s) for s in treatment.split(","))


def write_event_log(log: EventLog, path: PathLike, digits: Optional[int] = None) -> Path:
    """
    Write ``log`` as CSV plus its ``.meta`` sidecar.

    Times are printed with ``digits`` significant digits (settings default).
    """
    digits = settings.csv_significant_digits if digits is None else digits
    path = Path(path)
    chunks = np.split(log.observed_flat, log.observed_offsets[1:-1]) if len(log) else []
    frame = pd.DataFrame({
        "index": np.arange(len(log), dtype=np.int64),
        "arrival_time": log.arrival_time,
        "action": log.action,
        "observed": ["|".join(map(str, chunk.tolist())) for chunk in chunks],
        "assigned_server": log.assigned_server,
        "service_duration": log.service_duration,
        "response_time": log.response_time,
        "dispatcher_delay": log.dispatcher_delay,
        "dispatcher_backlog": log.dispatcher_backlog,
        "assigned_length": log.assigned_length,
    }, columns=EVENT_LOG_COLUMNS)
    _write_frame(frame, path, f"%.{digits}g")

    lines = format_config(log.config)
    lines += [
        f"replication = {log.replication}",
        f"n_control = {log.n_control}",
        f"n_treatment = {log.n_treatment}",
        f"emptied_at = {'none' if log.emptied_at is None else repr(float(log.emptied_at))}",
        f"group_partition = {_format_partition(log.group_partition)}",
    ]
    _write_lines(meta_path(path), lines)
    logger.info(f"Wrote {len(log)} records to {path}")
    return path


def _read_log_meta(path: Path) -> Tuple[str, Dict[str, str]]:
    sidecar = meta_path(path)
    if not sidecar.exists():
        raise ConfigInvalid(f"missing metadata file {sidecar}")
    text = sidecar.read_text(encoding="utf-8")
    pairs = read_pairs(text, KNOWN_KEYS | set(LOG_META_KEYS))
    extras = {key: pairs.pop(key)[0] for key in LOG_META_KEYS if key in pairs}
    config_text = "\n".join(f"{key} = {value}" for key, (value, _) in pairs.items())
    return config_text, extras


def read_event_log(path: PathLike) -> EventLog:
    """
    Read a log written by ``write_event_log``.

    A file without the ``assigned_length`` column takes the minimum observed
    queue length of each record.

    Raises:
        ConfigInvalid: If the sidecar is missing or invalid
        ConfigParseError: If a CSV column is missing or malformed
    """
    path = Path(path)
    config_text, extras = _read_log_meta(path)
    config, _ = parse_config(config_text)

    frame = pd.read_csv(path, dtype={"observed": str}, keep_default_na=False, float_precision="round_trip")
    missing = [c for c in EVENT_LOG_COLUMNS[:-1] if c not in frame.columns]
    if missing:
        raise ConfigParseError(f"{path}: missing columns {', '.join(missing)}")

    try:
        observed = [[int(v) for v in cell.split("|")] if cell else [] for cell in frame["observed"]]
    except ValueError as e:
        raise ConfigParseError(f"{path}: malformed observed column ({e})") from None
    lengths = [len(obs) for obs in observed]
    flat = np.fromiter((v for obs in observed for v in obs), dtype=np.int64, count=sum(lengths))
    if "assigned_length" in frame.columns:
        assigned_length = frame["assigned_length"].to_numpy(dtype=np.int64)
    else:
        assigned_length = np.array([min(obs) if obs else 0 for obs in observed], dtype=np.int64)

    emptied = extras.get("emptied_at", "none")
    log = EventLog(
        config=config,
        horizon=config.horizon,
        arrival_time=frame["arrival_time"].to_numpy(dtype=np.float64),
        action=frame["action"].to_numpy(dtype=np.int64),
        observed_flat=flat,
        observed_offsets=observed_offsets_from_lengths(lengths),
        assigned_server=frame["assigned_server"].to_numpy(dtype=np.int64),
        assigned_length=assigned_length,
        service_duration=frame["service_duration"].to_numpy(dtype=np.float64),
        response_time=frame["response_time"].to_numpy(dtype=np.float64),
        dispatcher_delay=frame["dispatcher_delay"].to_numpy(dtype=np.float64),
        dispatcher_backlog=frame["dispatcher_backlog"].to_numpy(dtype=np.int64),
        group_partition=_parse_partition(extras.get("group_partition", "none")),
        emptied_at=None if emptied == "none" else float(emptied),
        replication=int(extras.get("replication", "0")),
    )
    for key, count in (("n_control", log.n_control), ("n_treatment", log.n_treatment)):
        if key in extras and int(extras[key]) != count:
            raise ConfigInvalid(f"{path}: {key} in metadata is {extras[key]}, log has {count}")
    return log


# ---------------- Estimates -----------------

def _blank(value: Optional[float]) -> Optional[float]:
    return None if value is None else float(value)


def estimates_frame(reports: Sequence[EstimateReport]) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "estimator": r.estimator_name,
                "estimate": r.point_estimate,
                "std_error": r.std_error,
                "ci_low": r.ci_low,
                "ci_high": r.ci_high,
                "alpha_hat": _blank(r.alpha_hat),
                "lambda_hat": _blank(r.lambda_hat),
            }
            for r in reports
        ],
        columns=ESTIMATE_COLUMNS,
    )


def write_estimates(reports: Sequence[EstimateReport], path: PathLike) -> Path:
    path = Path(path)
    _write_frame(estimates_frame(reports), path, EXACT_FORMAT)
    return path


def read_estimates(path: PathLike) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")


# ---------------- Summaries -----------------

def summary_frame(summaries: Sequence[ReplicationSummary]) -> pd.DataFrame:
    rows = []
    for summary in summaries:
        for item in summary.estimators:
            rows.append({
                "table": summary.table,
                "row": summary.row,
                "estimator": item.estimator,
                "mean": item.mean,
                "std_dev": item.std_dev,
                "mse": item.mse,
                "ground_truth": summary.ground_truth,
                "gt_se": summary.gt_se,
                "replications": item.replications,
            })
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def write_summaries(
    summaries: Sequence[ReplicationSummary],
    path: PathLike,
    plans: Sequence[ExperimentPlan] = (),
) -> Path:
    """
    Write the summary CSV and a ``.meta`` sidecar with plans, seeds and wall times.

    The CSV depends only on the plans and seeds; timings go to the sidecar.
    """
    path = Path(path)
    _write_frame(summary_frame(summaries), path, EXACT_FORMAT)
    lines: List[str] = []
    for i, summary in enumerate(summaries):
        prefix = f"row{i}"
        lines.append(f"{prefix}.label = {summary.table}/{summary.row}")
        lines.append(f"{prefix}.wall_time = {summary.wall_time:.3f}")
        lines.append(f"{prefix}.failed_replications = {summary.failed_replications}")
        lines.append(f"{prefix}.invalid = {'yes' if summary.invalid else 'no'}")
        if i < len(plans):
            lines.append(f"{prefix}.seed = {plans[i].base.seed}")
            lines.append(f"{prefix}.plan = '{plans[i].model_dump_json()}'")
    _write_lines(meta_path(path), lines)
    logger.info(f"Wrote {len(summaries)} summaries to {path}")
    return path


def read_summaries(path: PathLike) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")


def summary_metadata(path: PathLike) -> Dict[str, str]:
    """Sidecar of a summary CSV as a flat dict."""
    pairs = read_pairs(meta_path(path).read_text(encoding="utf-8"))
    return {key: value for key, (value, _) in pairs.items()}


def plan_from_metadata(metadata: Dict[str, str], row: int = 0) -> ExperimentPlan:
    return ExperimentPlan.model_validate(json.loads(metadata[f"row{row}.plan"]))
