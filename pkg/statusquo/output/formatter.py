"""Rich console rendering of experiment results."""

from typing import Dict, Optional

from rich.console import Console
from rich.table import Table


def _fmt(value: Optional[float], spec: str = ".3f") -> str:
    return "-" if value is None else format(value, spec)


def render_final_metrics(console: Console, summary: dict):
    """Final-epoch mean ± std per agent and metric."""
    table = Table(title=f"{summary['experiment']} ({', '.join(summary['learners'])})")
    table.add_column("Agent", style="cyan")
    table.add_column("Metric")
    table.add_column("Mean", justify="right")
    table.add_column("Std", justify="right")
    for agent, metrics in summary.get("final", {}).items():
        for name, stats in metrics.items():
            table.add_row(agent, name, _fmt(stats["mean"]), _fmt(stats["std"]))
    console.print(table)

    if summary.get("epochs_to_cooperation") is not None:
        console.print(f"Epochs to cooperation (seed mean): [yellow]{summary['epochs_to_cooperation']}[/yellow]")
    if summary.get("failed_seeds"):
        console.print(f"[bold red]Failed seeds: {summary['failed_seeds']}[/bold red]")


def render_z_sweep(console: Console, summary: dict):
    table = Table(title="z sweep")
    table.add_column("z", justify="right", style="cyan")
    table.add_column("Epochs to cooperation", justify="right")
    table.add_column("Median per seed", justify="right")
    table.add_column("Final NDR agent1", justify="right")
    for z, report in summary["z_sweep"].items():
        final = report["final"].get("agent1", {}).get("ndr", {})
        table.add_row(
            z,
            _fmt(report["epochs_to_cooperation"], "d") if report["epochs_to_cooperation"] is not None else "-",
            _fmt(report["median_epochs_to_cooperation"], ".1f"),
            _fmt(final.get("mean")),
        )
    console.print(table)


def render_distill(console: Console, summaries: Dict[str, dict]):
    """Cluster quality and oracle solo results per agent."""
    clusters = Table(title="GameDistill clusters")
    for column in ("Agent", "Purity", "Sizes", "Mean opp. reward", "Method agreement", "Color acc."):
        clusters.add_column(column)
    oracles = Table(title="Oracle solo evaluation")
    for column in ("Agent", "Oracle", "Own-color picks", "Other-color picks", "Train acc."):
        oracles.add_column(column)

    for agent, summary in summaries.items():
        report = summary["clusters"]
        clusters.add_row(
            agent,
            _fmt(report["purity"]),
            ", ".join(f"{k}={v}" for k, v in report["sizes"].items()),
            ", ".join(f"{k}={v:.2f}" for k, v in report["mean_opponent_reward"].items()),
            _fmt(report["method_agreement"]),
            _fmt(summary["holdout_color_accuracy"]),
        )
        for role, solo in summary["solo"].items():
            oracles.add_row(
                agent,
                role,
                _fmt(solo["own_pick_rate"], ".1%"),
                _fmt(solo["other_pick_rate"], ".1%"),
                _fmt(summary["oracle_training_accuracy"][role]),
            )
    console.print(clusters)
    console.print(oracles)


def render_solo_report(console: Console, report: dict):
    console.print(f"\n[bold]Oracle:[/bold] {report.get('role') or 'unknown'}")
    console.print(f"  Trials per color: {report['trials']} (budget {report['max_steps']} steps)")
    console.print(f"  Own-color pick rate:   [green]{report['own_pick_rate']:.1%}[/green]")
    console.print(f"  Other-color pick rate: [yellow]{report['other_pick_rate']:.1%}[/yellow]\n")
