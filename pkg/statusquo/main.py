"""Main CLI entry point for StatusQuo.

Exit status: 0 on success, 2 on configuration errors, 1 on any other failure.
"""

import logging
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import typer
from rich.console import Console

from .config import Config, load_config
from .distill.oracle import evaluate_oracle_solo
from .distill.storage import load_model
from .errors import ConfigValidationError
from .experiments.runner import run_distill, run_experiment
from .output.formatter import render_distill, render_final_metrics, render_solo_report, render_z_sweep
from .seeds import stream

logger = logging.getLogger(__name__)
console = Console()

app = typer.Typer(help="Status-quo learners and GameDistill on social dilemmas.", add_completion=False)

SEEDS_HELP = "Seeds as a range (0-19) or a comma list (1,4,7)"


def _setup_logging(verbose: bool):
    logging.basicConfig(
        level=logging.DEBUG if verbose else getattr(logging, Config.LOG_LEVEL, logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        force=True,
    )


def _overrides(seeds: Optional[str], out: Optional[Path], **extra) -> Dict[str, Any]:
    overrides: Dict[str, Any] = dict(extra)
    if seeds is not None:
        overrides['seeds'] = seeds
    if out is not None:
        overrides['output_dir'] = str(out)
    return overrides


def _guard(action: Callable[[], None]):
    """Run a command body and map failures to exit codes."""
    try:
        action()
    except ConfigValidationError as e:
        console.print(f"[bold red]Invalid configuration: {e}[/bold red]")
        raise typer.Exit(code=2)
    except typer.Exit:
        raise
    except Exception as e:
        logger.exception("Command failed")
        console.print(f"[bold red]✗ {e}[/bold red]")
        raise typer.Exit(code=1)


@app.command()
def run(
    config_path: Path = typer.Argument(..., exists=True, dir_okay=False, help="YAML experiment file"),
    seeds: Optional[str] = typer.Option(None, "--seeds", help=SEEDS_HELP),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
    threads: int = typer.Option(Config.THREADS, "--threads", min=1, help="Seed-parallel workers"),
    no_cache: bool = typer.Option(False, "--no-cache", help="Ignore and do not fill the run store"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
):
    """Run the experiment described by a config file."""
    _setup_logging(verbose)

    def action():
        config = load_config(config_path, _overrides(seeds, out))
        result = run_experiment(config, threads=threads, use_cache=not no_cache)
        if config.experiment == "z_sweep":
            render_z_sweep(console, result.summary)
        else:
            if result.distill:
                render_distill(console, result.distill)
            render_final_metrics(console, result.summary)
        console.print(f"[bold green]✓ Results written to {config.output_dir}[/bold green]")

    _guard(action)


@app.command()
def distill(
    config_path: Path = typer.Argument(..., exists=True, dir_okay=False, help="YAML experiment file"),
    seeds: Optional[str] = typer.Option(None, "--seeds", help="The first seed roots both agents' streams"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
    threads: int = typer.Option(Config.THREADS, "--threads", min=1, help="Run both agents in parallel when > 1"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
):
    """Run GameDistill for both agents and save their oracles."""
    _setup_logging(verbose)

    def action():
        config = load_config(config_path, _overrides(seeds, out, environment='coin', experiment='coin_gamedistill'))
        results = run_distill(config, threads=threads)
        render_distill(console, {agent: result.summary() for agent, result in results.items()})
        console.print(f"[bold green]✓ Oracles written to {Path(config.output_dir) / 'distill'}[/bold green]")

    _guard(action)


@app.command("sweep-z")
def sweep_z(
    config_path: Path = typer.Argument(..., exists=True, dir_okay=False, help="YAML experiment file"),
    seeds: Optional[str] = typer.Option(None, "--seeds", help=SEEDS_HELP),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
    threads: int = typer.Option(Config.THREADS, "--threads", min=1, help="Seed-parallel workers"),
    no_cache: bool = typer.Option(False, "--no-cache", help="Ignore and do not fill the run store"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
):
    """Train SQ/SQ on the IPD for every configured z."""
    _setup_logging(verbose)

    def action():
        config = load_config(config_path, _overrides(seeds, out, experiment='z_sweep', environment='ipd'))
        result = run_experiment(config, threads=threads, use_cache=not no_cache)
        render_z_sweep(console, result.summary)

    _guard(action)


@app.command("eval-oracle")
def eval_oracle(
    model: Path = typer.Argument(..., exists=True, dir_okay=False, help="Saved oracle (.npz)"),
    episodes: int = typer.Argument(..., min=1, help="Solo trials per coin color"),
    seed: int = typer.Option(0, "--seed", help="Placement seed"),
    max_steps: int = typer.Option(4, "--max-steps", min=1, help="Step budget per coin"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
):
    """Play a saved oracle alone on the grid and report its pick rates."""
    _setup_logging(verbose)

    def action():
        oracle = load_model(model)
        report = evaluate_oracle_solo(oracle, episodes, stream(seed, "eval"), max_steps)
        render_solo_report(console, report.to_dict())

    _guard(action)


if __name__ == "__main__":
    app()
