"""
Command-line entry point for queue A/B experiments.

Simulates randomized scheduling-policy experiments, estimates their global
treatment effect and reproduces the replication tables.
"""

from pathlib import Path
from typing import List, Optional, Sequence
import logging
import sys

import click
from rich.console import Console
from rich.table import Table

from config.settings import settings
from src.errors import ConfigInvalid, QueueABError
from src.estimators import EstimatorSpec, default_estimators, run_estimators
from src.harness import ground_truth_gte, run_experiment, table_plans
from src.harness.plan import ReplicationSummary
from src.simulation import simulate
from src.storage import parse_config, read_event_log, write_estimates, write_event_log, write_summaries
from src.utils.logger import logger, setup_logger


console = Console()

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2


def _fmt(value: Optional[float], digits: int = 4) -> str:
    if value is None or value != value:
        return "-"
    return f"{value:.{digits}f}"


def _load_config(path: Path, seed: Optional[int]):
    config, plan = parse_config(path.read_text(encoding="utf-8"))
    if seed is not None:
        config = config.replace(seed=seed)
        plan = plan.model_copy(update={"base": config})
    return config, plan


def _out_path(out: Optional[Path], default: str) -> Path:
    return out if out is not None else settings.output_dir / default


def print_reports(reports, failures, title: str = "Estimates"):
    """Print estimator reports as a table."""
    table = Table(title=title, border_style="green")
    table.add_column("Estimator", style="cyan", no_wrap=True)
    for name in ("Estimate", "Std. Error", "CI low", "CI high", "alpha"):
        table.add_column(name, style="white", justify="right")
    for r in reports:
        table.add_row(
            r.estimator_name, _fmt(r.point_estimate), _fmt(r.std_error),
            _fmt(r.ci_low), _fmt(r.ci_high), _fmt(r.alpha_hat, 3),
        )
    console.print(table)
    for name, error in failures.items():
        console.print(f"[yellow]{name}: {error}[/yellow]")


def print_summaries(summaries: Sequence[ReplicationSummary]):
    """Print replication summaries, one table per row."""
    for summary in summaries:
        title = f"Table {summary.table} {summary.row} (GTE {_fmt(summary.ground_truth, 3)})"
        table = Table(title=title, border_style="green")
        table.add_column("Estimator", style="cyan", no_wrap=True)
        for name in ("Est.", "Std. Dev.", "MSE", "Reps"):
            table.add_column(name, style="white", justify="right")
        for item in summary.estimators:
            table.add_row(
                item.estimator, _fmt(item.mean, 3), _fmt(item.std_dev, 3),
                _fmt(item.mse, 4), str(item.replications),
            )
        console.print(table)
        if summary.invalid:
            console.print(f"[red]Invalid: {summary.failed_replications} of {summary.replications} replications failed[/red]")


@click.group()
@click.option('--verbose', '-v', is_flag=True, help='Enable verbose logging')
def cli(verbose: bool):
    """
    Randomized experiments on parallel-server queues.

    Examples:

        # Simulate one replication and write its event log
        python main.py simulate --config t1.cfg --out log.csv

        # Estimate the treatment effect from a log
        python main.py estimate --in log.csv

        # Reproduce table 1 at a tenth of the full size
        python main.py table --table 1 --scale 0.1
    """
    if verbose:
        setup_logger(level=logging.DEBUG)


@cli.command(name="simulate")
@click.option('--config', 'config_path', required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), help='Event log CSV path')
@click.option('--seed', type=click.IntRange(0, 2**64 - 1), help='Root seed (overrides the config)')
@click.option('--replication', type=click.IntRange(0), default=0, show_default=True)
def simulate_cmd(config_path: Path, out: Optional[Path], seed: Optional[int], replication: int):
    """Simulate one replication and write its event log."""
    config, _ = _load_config(config_path, seed)
    log = simulate(config, replication)
    path = write_event_log(log, _out_path(out, "log.csv"))

    table = Table(title="Simulation", border_style="green")
    table.add_column("Property", style="cyan", no_wrap=True)
    table.add_column("Value", style="white")
    table.add_row("Arrivals", str(len(log)))
    table.add_row("Control / treatment", f"{log.n_control} / {log.n_treatment}")
    table.add_row("Emptied at", _fmt(log.emptied_at, 3))
    table.add_row("Output", str(path))
    console.print(table)


@cli.command()
@click.option('--in', 'in_path', required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--estimators', '-e', multiple=True, help='Estimator names (default: by design)')
@click.option('--truncation', '-L', type=click.IntRange(0), help='Truncation for Q-based estimators')
@click.option('--mu', type=click.Choice(['known', 'estimated']), default='known', show_default=True)
@click.option('--level', type=click.FloatRange(0, 1, min_open=True, max_open=True), help='Confidence level')
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), help='Estimates CSV path')
def estimate(in_path: Path, estimators: Sequence[str], truncation: Optional[int], mu: str, level: Optional[float], out: Optional[Path]):
    """Estimate the global treatment effect from an event log."""
    log = read_event_log(in_path)
    try:
        specs: List[EstimatorSpec] = (
            [EstimatorSpec(name, truncation=truncation) for name in estimators]
            if estimators else
            [EstimatorSpec(s.name, truncation=truncation) for s in default_estimators(log)]
        )
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="--estimators")
    reports, failures = run_estimators(log, specs, mu="estimated" if mu == "estimated" else None, level=level)
    path = write_estimates(reports, _out_path(out, "estimates.csv"))
    print_reports(reports, failures)
    console.print(f"[green]Wrote {path}[/green]")
    if not reports:
        raise QueueABError("every estimator failed")


@cli.command(name="ground-truth")
@click.option('--config', 'config_path', required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--seed', type=click.IntRange(0, 2**64 - 1))
@click.option('--horizon', type=click.FloatRange(0, min_open=True), help='Horizon of each global run')
@click.option('--reps', type=click.IntRange(1), help='Replications per arm')
@click.option('--jobs', '-j', type=click.IntRange(1), help='Worker processes')
def ground_truth(config_path: Path, seed: Optional[int], horizon: Optional[float], reps: Optional[int], jobs: Optional[int]):
    """Compute the global treatment effect from global-control and global-treatment runs."""
    config, _ = _load_config(config_path, seed)
    value, se = ground_truth_gte(config, horizon, reps, jobs)
    console.print(f"GTE = [bold]{value:.6f}[/bold]  SE = {_fmt(se, 6)}")


@cli.command()
@click.option('--config', 'config_path', required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), help='Summary CSV path')
@click.option('--seed', type=click.IntRange(0, 2**64 - 1))
@click.option('--jobs', '-j', type=click.IntRange(1), help='Worker processes')
def experiment(config_path: Path, out: Optional[Path], seed: Optional[int], jobs: Optional[int]):
    """Run a replicated experiment and summarize every estimator."""
    _, plan = _load_config(config_path, seed)
    summary = run_experiment(plan, jobs)
    path = write_summaries([summary], _out_path(out, "summary.csv"), [plan])
    print_summaries([summary])
    console.print(f"[green]Wrote {path}[/green]")


@cli.command()
@click.option('--table', 'table_id', type=int, help='Table number (1-13); defaults to the config\'s table key')
@click.option('--scale', type=click.FloatRange(0, 1, min_open=True), default=0.1, show_default=True)
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False, path_type=Path), help='Config whose seed and table are used')
@click.option('--ground-truth', 'truth', type=click.Choice(['supplied', 'compute']), default='supplied', show_default=True)
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), help='Summary CSV path')
@click.option('--seed', type=click.IntRange(0, 2**64 - 1))
@click.option('--jobs', '-j', type=click.IntRange(1), help='Worker processes')
def table(table_id: Optional[int], scale: float, config_path: Optional[Path], truth: str, out: Optional[Path], seed: Optional[int], jobs: Optional[int]):
    """Reproduce one catalogued table at a fraction of its full size."""
    if config_path is not None:
        config, plan = _load_config(config_path, None)
        if seed is None:
            seed = config.seed
        if table_id is None and plan.table.isdigit():
            table_id = int(plan.table)
    if table_id is None:
        raise click.UsageError("--table is required unless the config names a table")
    plans = table_plans(table_id, scale, truth, seed)
    summaries = [run_experiment(plan, jobs) for plan in plans]
    path = write_summaries(summaries, _out_path(out, f"table{table_id}.csv"), plans)
    print_summaries(summaries)
    console.print(f"[green]Wrote {path}[/green]")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and map failures to exit codes: 1 invalid input, 2 runtime error."""
    try:
        cli.main(args=list(argv) if argv is not None else None, prog_name="main.py", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return EXIT_INVALID
    except click.exceptions.Abort:
        return EXIT_INVALID
    except ConfigInvalid as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_INVALID
    except (QueueABError, OSError) as e:
        logger.error(f"Error: {e}")
        logger.debug("Full traceback:", exc_info=True)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
