"""Quick end-to-end check of the StatusQuo data path.

Runs a tiny IPD experiment, reads its metric file back and exercises the
run store, without any training-scale work.
"""

import tempfile
from pathlib import Path

import numpy as np
from rich.console import Console

from statusquo.config import Config, config_from_dict
from statusquo.data.cache import RunStore, config_hash
from statusquo.data.metrics import metrics_from_table, read_metrics
from statusquo.envs import GameKind, payoff
from statusquo.experiments.runner import run_experiment

console = Console()


def check_games():
    """Payoff tables."""
    console.print("\n[bold cyan]StatusQuo smoke test[/bold cyan]\n")
    console.print("[bold]1. Checking payoff tables...[/bold]")
    assert payoff(GameKind.PRISONERS_DILEMMA, ("C", "C")) == (-1.0, -1.0)
    assert payoff(GameKind.PRISONERS_DILEMMA, ("D", "C")) == (0.0, -3.0)
    assert payoff(GameKind.MATCHING_PENNIES, ("H", "T")) == (-1.0, 1.0)
    console.print("   ✓ IPD, IMP and ISH tables load")
    console.print()


def check_run(output_dir: Path):
    """Two-epoch IPD run for two seeds."""
    console.print("[bold]2. Running a two-epoch IPD experiment...[/bold]")
    config = config_from_dict({
        "experiment": "ipd",
        "seeds": "0-1",
        "epochs": 2,
        "sq": {"batch_size": 4},
        "env": {"episode_length": 20},
        "output_dir": str(output_dir),
    })
    result = run_experiment(config)
    console.print(f"   ✓ Config hash: {result.digest[:12]}")
    console.print(f"   ✓ Wrote {result.files['metrics_csv'].name} and {result.files['summary'].name}")

    table = read_metrics(result.files["metrics_csv"])
    rebuilt = metrics_from_table(table)
    assert rebuilt.frame().equals(result.metrics.frame()), "Metric CSV did not round-trip"
    console.print(f"   ✓ Metric CSV round-trips ({len(table)} rows)")
    ndr = result.summary["final"]["agent1"]["ndr"]
    console.print(f"   ✓ Final agent1 NDR: {ndr['mean']:.3f} ± {ndr['std']:.3f}")
    console.print()
    return config, result


def check_store(config, result):
    """Stored seeds are found again under the same config hash."""
    console.print("[bold]3. Checking the run store...[/bold]")
    store = RunStore(Config.cache_db_for(config.output_dir))
    digest = config_hash(config.fingerprint())
    assert digest == result.digest
    assert store.seeds(digest) == [0, 1], "Finished seeds were not stored"
    console.print(f"   ✓ Stored seeds: {store.seeds(digest)}")

    again = run_experiment(config)
    assert np.array_equal(
        again.metrics.frame()["value"].to_numpy(), result.metrics.frame()["value"].to_numpy()
    )
    console.print("   ✓ Resumed run reused stored seeds")

    stats = store.get_stats()
    console.print(f"   ✓ Store holds {stats['total_entries']} entries ({stats['db_size_mb']} MB)")
    store.clear()
    console.print("   ✓ Cleared run store")
    console.print()


def main():
    console.print("[bold green]═══════════════════════════════════════════[/bold green]")
    console.print("[bold green]         StatusQuo Smoke Test              [/bold green]")
    console.print("[bold green]═══════════════════════════════════════════[/bold green]")

    try:
        check_games()
        with tempfile.TemporaryDirectory() as tmp:
            config, result = check_run(Path(tmp))
            check_store(config, result)
        console.print("[bold green]✓ Smoke test passed[/bold green]\n")
    except Exception as e:
        console.print(f"\n[bold red]✗ Smoke test failed: {e}[/bold red]\n")
        raise


if __name__ == "__main__":
    main()
