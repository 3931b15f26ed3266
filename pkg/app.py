# app.py
# -------------------------------
# Command-line entry point. Uses the app-factory pattern: create_app builds
# the click group and registers one subcommand per analysis.
#
# Exit codes:
#   0  every requested bound check is satisfied
#   1  the report could not be written
#   2  config or argument error (unreadable/malformed/schema-invalid config,
#      bad parameter, off-grid loss, mismatched dimensions)
#   3  capacity error (exact enumeration too large)
#   4  at least one bound check is violated
# -------------------------------

from __future__ import annotations

import logging
from typing import Any, Callable, Dict, List, Optional

import click

from config import Config
from errors import CapacityError, GenBoundError
from experiments import RUNNERS
from reports import Item, all_satisfied, emit_report, write_report
from schema import ExperimentConfig, load_config

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_CAPACITY = 3
EXIT_VIOLATION = 4

logger = logging.getLogger(__name__)


def configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else getattr(logging, Config.LOG_LEVEL, logging.WARNING)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s",
                        force=True)


def apply_overrides(cfg: ExperimentConfig, seed: Optional[int], trials: Optional[int],
                    fmt: Optional[str], out: Optional[str], no_timestamp: bool) -> ExperimentConfig:
    """Command-line flags win over the config file."""
    analysis: Dict[str, Any] = {}
    if seed is not None:
        analysis["seed"] = seed
    if trials is not None:
        analysis["trials"] = trials
    output: Dict[str, Any] = {}
    if fmt is not None:
        output["format"] = fmt
    if out is not None:
        output["path"] = out
    if no_timestamp:
        output["timestamp"] = False
    return cfg.model_copy(update={
        "analysis": cfg.analysis.model_copy(update=analysis),
        "output": cfg.output.model_copy(update=output),
    })


def common_options(func: Callable) -> Callable:
    options = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False),
                     help="Experiment config (JSON)."),
        click.option("--seed", type=click.IntRange(min=0), help="Seed for every random stream."),
        click.option("--trials", type=click.IntRange(min=1), help="Monte Carlo trials."),
        click.option("--format", "fmt", type=click.Choice(["json", "csv"]), help="Report format."),
        click.option("--out", help="Report path; '-' or omitted writes to stdout."),
        click.option("--no-timestamp", is_flag=True, help="Leave generated_at out of the report."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def run_analysis(name: str, config_path: Optional[str], seed: Optional[int],
                 trials: Optional[int], fmt: Optional[str], out: Optional[str],
                 no_timestamp: bool) -> int:
    """Load, run, write. Returns the exit code."""
    try:
        cfg = load_config(config_path) if config_path else ExperimentConfig()
        cfg = apply_overrides(cfg, seed, trials, fmt, out, no_timestamp)
        items: List[Item] = RUNNERS[name](cfg)
        text = emit_report(items, cfg.output.format, cfg.output.timestamp)
    except CapacityError as exc:
        click.echo(f"Capacity error: {exc}", err=True)
        return EXIT_CAPACITY
    except GenBoundError as exc:
        click.echo(f"Error: {exc}", err=True)
        return EXIT_CONFIG

    try:
        write_report(text, cfg.output.path)
    except OSError as exc:
        click.echo(f"Cannot write report: {exc}", err=True)
        return EXIT_IO

    if not all_satisfied(items):
        click.echo("At least one bound check is violated.", err=True)
        return EXIT_VIOLATION
    return EXIT_OK


def _make_command(name: str) -> click.Command:
    doc = (RUNNERS[name].__doc__ or f"Run the `{name}` analysis.").strip().splitlines()[0]

    @click.command(name, help=doc)
    @common_options
    @click.pass_context
    def command(ctx: click.Context, config_path: Optional[str], seed: Optional[int],
                trials: Optional[int], fmt: Optional[str], out: Optional[str],
                no_timestamp: bool) -> None:
        ctx.exit(run_analysis(name, config_path, seed, trials, fmt, out, no_timestamp))

    return command


def create_app() -> click.Group:
    @click.group(help="Exact information-theoretic generalization bounds on finite problems.")
    @click.option("--verbose", "-v", is_flag=True, help="Debug logging.")
    @click.option("--workers", type=click.IntRange(min=1),
                  help="Monte Carlo workers (overrides GENBOUND_WORKERS).")
    def cli(verbose: bool, workers: Optional[int]) -> None:
        configure_logging(verbose)
        if workers is not None:
            Config.WORKERS = workers

    for name in RUNNERS:
        cli.add_command(_make_command(name))
    return cli


main = create_app()


if __name__ == "__main__":
    main()
