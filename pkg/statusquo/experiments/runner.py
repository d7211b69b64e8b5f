"""Experiment orchestration: seeds, GameDistill, sweeps and artifacts."""

import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from ..agents.training import EnvironmentSpec, train_pair
from ..config import Config
from ..data.cache import CachedSeedRunner, RunStore, config_hash
from ..data.metrics import (
    epochs_to_cooperation,
    epochs_to_cooperation_per_seed,
    final_summary,
    median_epochs_to_cooperation,
    write_manifest,
    write_metrics,
    write_summary,
)
from ..data.models import AGENTS, ExperimentConfig, RunMetrics
from ..distill.oracle import OraclePair
from ..distill.pipeline import DistillResult, load_oracle_pair, run_gamedistill, save_distill_artifacts
from ..errors import WorkerFailureError
from ..seeds import stream

logger = logging.getLogger(__name__)

AGENT_COLORS = {"agent1": "red", "agent2": "blue"}
DISTILL_DIR = "distill"


@dataclass
class ExperimentResult:
    """What one experiment produced and where it was written."""

    config: ExperimentConfig
    metrics: RunMetrics
    digest: str
    files: Dict[str, Path] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    sweep: Dict[int, RunMetrics] = field(default_factory=dict)
    distill: Dict[str, dict] = field(default_factory=dict)


def environment_spec(config: ExperimentConfig) -> EnvironmentSpec:
    return EnvironmentSpec(
        name=config.environment,
        episode_length=config.env.episode_length,
        respawn=config.env.respawn,
        stationarity=config.env.stationarity if not config.is_coin else 1,
    )


def _open_store(config: ExperimentConfig, use_cache: bool) -> Optional[RunStore]:
    if not use_cache:
        return None
    return RunStore(Config.cache_db_for(config.output_dir))


def run_seeds(
    config: ExperimentConfig,
    digest: str,
    store: Optional[RunStore] = None,
    threads: int = 1,
    oracles: Optional[Tuple[OraclePair, OraclePair]] = None,
) -> Tuple[RunMetrics, List[int]]:
    """Train every configured seed, reusing stored ones.

    Returns:
        (merged metrics of the finished seeds, failed seeds)
    """
    env = environment_spec(config)
    cached = CachedSeedRunner(store, digest)
    metrics = RunMetrics(seeds=[])
    pending = []
    for seed in config.seeds:
        stored = cached.lookup(seed)
        if stored is not None:
            metrics = metrics.merge(stored)
        else:
            pending.append(seed)

    def task(seed):
        return (env, config.learners, config.sq, seed, config.epochs, oracles, config.log_every)

    failed: List[int] = []
    if threads > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=threads) as executor:
            futures = {executor.submit(train_pair, *task(seed)): seed for seed in pending}
            for future in as_completed(futures):
                seed = futures[future]
                try:
                    result = future.result()
                except Exception:
                    logger.exception(f"Seed {seed} failed")
                    failed.append(seed)
                    continue
                cached.record(seed, result)
                metrics = metrics.merge(result)
                logger.info(f"Seed {seed} finished")
    else:
        for seed in pending:
            try:
                result = train_pair(*task(seed))
            except Exception:
                logger.exception(f"Seed {seed} failed")
                failed.append(seed)
                continue
            cached.record(seed, result)
            metrics = metrics.merge(result)
            logger.info(f"Seed {seed} finished")
    return metrics, sorted(failed)


def distill_agents(config: ExperimentConfig, threads: int = 1) -> Dict[str, DistillResult]:
    """Independent GameDistill runs for both agents.

    Each agent uses its own ``distill`` stream of the first configured seed.
    """
    root = config.seeds[0]
    jobs = {
        agent: (
            AGENT_COLORS[agent],
            config.distill,
            stream(root, f"distill{index + 1}"),
            config.env.episode_length,
            config.env.respawn,
        )
        for index, agent in enumerate(AGENTS)
    }
    if threads > 1:
        with ProcessPoolExecutor(max_workers=2) as executor:
            futures = {agent: executor.submit(run_gamedistill, *job) for agent, job in jobs.items()}
            return {agent: future.result() for agent, future in futures.items()}
    return {agent: run_gamedistill(*job) for agent, job in jobs.items()}


def run_distill(config: ExperimentConfig, threads: int = 1) -> Dict[str, DistillResult]:
    """Run GameDistill for both agents and persist oracles and cluster reports."""
    directory = Path(config.output_dir) / DISTILL_DIR
    results = distill_agents(config, threads)
    for result in results.values():
        save_distill_artifacts(result, directory, config.distill_fingerprint())
    return results


def _oracles_for(config: ExperimentConfig, threads: int, summaries: Dict[str, dict]) -> Tuple[OraclePair, OraclePair]:
    """Saved oracles when both agents have them (except for coin_gamedistill), else a fresh distill.

    Saved oracles count only when their manifest matches this config's
    distill fingerprint, root seed included.
    """
    directory = Path(config.output_dir) / DISTILL_DIR
    if config.experiment != "coin_gamedistill":
        fingerprint = config.distill_fingerprint()
        saved = [load_oracle_pair(directory, AGENT_COLORS[agent], fingerprint) for agent in AGENTS]
        if all(pair is not None for pair in saved):
            logger.info(f"Using saved oracles from {directory}")
            return tuple(saved)
    results = run_distill(config, threads)
    summaries.update({agent: result.summary() for agent, result in results.items()})
    return tuple(results[agent].oracles for agent in AGENTS)


def run_digest(config: ExperimentConfig, oracles: Optional[Sequence[OraclePair]] = None) -> str:
    """Run-store key: the config fingerprint plus the identity of any oracles played through."""
    fingerprint = config.fingerprint()
    if oracles is not None:
        fingerprint["oracles"] = [pair.parameter_digest() for pair in oracles]
    return config_hash(fingerprint)


def _write_artifacts(
    metrics: RunMetrics,
    directory: Path,
    stem: str,
) -> Dict[str, Path]:
    directory.mkdir(parents=True, exist_ok=True)
    csv_path = write_metrics(metrics, directory / f"{stem}.csv")
    manifest = write_manifest(metrics, csv_path, directory / f"{stem}_manifest.json")
    return {f"{stem}_csv": csv_path, f"{stem}_manifest": manifest}


def _base_summary(config: ExperimentConfig, digest: str, metrics: RunMetrics) -> dict:
    return {
        "experiment": config.experiment,
        "environment": config.environment,
        "learners": list(config.learners),
        "config_hash": digest,
        "seeds": metrics.seeds,
        "epochs": config.epochs,
        "std": "population (ddof=0)",
        "final": final_summary(metrics),
    }


def _run_z_sweep(config: ExperimentConfig, store: Optional[RunStore], threads: int) -> ExperimentResult:
    directory = Path(config.output_dir)
    sweep: Dict[int, RunMetrics] = {}
    files: Dict[str, Path] = {}
    report = {}
    failures: Dict[int, List[int]] = {}
    for z in config.z_values:
        z_config = replace(config, sq=replace(config.sq, z=z))
        digest = config_hash(z_config.fingerprint())
        logger.info(f"z sweep: z={z}")
        metrics, failed = run_seeds(z_config, digest, store, threads)
        sweep[z] = metrics
        files.update(_write_artifacts(metrics, directory, f"metrics_z{z}"))
        per_seed = epochs_to_cooperation_per_seed(metrics)
        report[str(z)] = {
            "config_hash": digest,
            "epochs_to_cooperation": epochs_to_cooperation(metrics),
            "epochs_to_cooperation_per_seed": {str(s): v for s, v in per_seed.items()},
            "median_epochs_to_cooperation": median_epochs_to_cooperation(per_seed),
            "final": final_summary(metrics),
        }
        if failed:
            failures[z] = failed

    digest = config_hash(config.fingerprint())
    summary = {
        "experiment": config.experiment,
        "config_hash": digest,
        "seeds": list(config.seeds),
        "z_values": list(config.z_values),
        "z_sweep": report,
    }
    files["summary"] = write_summary(directory / "summary.json", summary)
    if failures:
        raise WorkerFailureError(sorted({s for seeds in failures.values() for s in seeds}))
    merged = RunMetrics(seeds=list(config.seeds))
    return ExperimentResult(config, merged, digest, files, summary, sweep)


def run_experiment(config: ExperimentConfig, threads: int = 1, use_cache: bool = True) -> ExperimentResult:
    """Run a validated experiment and write its metric CSV, manifest and summary.

    Finished seeds are flushed to the run store as they complete; when any
    seed fails, the finished ones are still written before WorkerFailureError
    is raised.
    """
    Config.ensure_output_dir(config.output_dir)
    store = _open_store(config, use_cache)
    logger.info(
        f"Running {config.experiment}: {config.learners[0]} vs {config.learners[1]} on "
        f"{config.environment}, seeds {seeds_summary(config.seeds)}"
    )
    if config.experiment == "z_sweep":
        return _run_z_sweep(config, store, threads)

    distill_summaries: Dict[str, dict] = {}
    oracles = _oracles_for(config, threads, distill_summaries) if config.is_coin else None
    digest = run_digest(config, oracles)
    metrics, failed = run_seeds(config, digest, store, threads, oracles)

    directory = Path(config.output_dir)
    files = _write_artifacts(metrics, directory, "metrics")
    summary = _base_summary(config, digest, metrics)
    if config.environment == "ipd":
        per_seed = epochs_to_cooperation_per_seed(metrics)
        summary["epochs_to_cooperation"] = epochs_to_cooperation(metrics)
        summary["median_epochs_to_cooperation"] = median_epochs_to_cooperation(per_seed)
    if distill_summaries:
        summary["distill"] = distill_summaries
    if failed:
        summary["failed_seeds"] = failed
    files["summary"] = write_summary(directory / "summary.json", summary)

    if failed:
        raise WorkerFailureError(failed)
    logger.info(f"Finished {config.experiment}: {len(metrics.seeds)} seeds written to {directory}")
    return ExperimentResult(config, metrics, digest, files, summary, distill=distill_summaries)


def seeds_summary(seeds: Sequence[int]) -> str:
    return f"{seeds[0]}..{seeds[-1]}" if len(seeds) > 1 else str(seeds[0])
