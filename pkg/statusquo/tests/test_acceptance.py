"""Training-scale checks; run with ``pytest --runslow``."""

import numpy as np
import pytest

from statusquo.config import config_from_dict
from statusquo.data.metrics import epochs_to_cooperation_per_seed, median_epochs_to_cooperation
from statusquo.experiments.runner import run_experiment

pytestmark = pytest.mark.slow


def final(result, agent, metric):
    return result.summary["final"][agent][metric]


def run(tmp_path, **raw):
    return run_experiment(config_from_dict({"output_dir": str(tmp_path), **raw}), threads=4, use_cache=False)


def test_ipd_status_quo_pair_cooperates(tmp_path):
    sq = run(tmp_path / "sq", experiment="ipd")
    sl = run(tmp_path / "sl", experiment="ipd", learners=["sl", "sl"])
    assert -1.15 <= final(sq, "agent1", "ndr")["mean"] <= -0.95
    assert -2.05 <= final(sl, "agent1", "ndr")["mean"] <= -1.80
    assert final(sq, "agent1", "ndr")["std"] < 0.1
    assert final(sq, "agent1", "ndr")["std"] < final(sl, "agent1", "ndr")["std"]


def test_matching_pennies_ends_near_zero(tmp_path):
    result = run(tmp_path, experiment="imp")
    for agent in ("agent1", "agent2"):
        assert abs(final(result, agent, "ndr")["mean"]) <= 0.1


def test_stag_hunt_ends_near_zero(tmp_path):
    result = run(tmp_path, experiment="ish")
    assert -0.15 <= final(result, "agent1", "ndr")["mean"] <= 0.0


def test_status_quo_learner_defects_against_defectors(tmp_path):
    for opponent in ("always_defect", "always_cooperate"):
        result = run(tmp_path / opponent, experiment="exploitability", learners=["sq", opponent], seeds="0-4")
        assert final(result, "agent1", "defection_rate")["mean"] > 0.9


def test_coin_game_status_quo_learners_pick_own_coins(tmp_path):
    result = run(tmp_path, experiment="coin_sq", seeds="0-4")
    for agent in ("agent1", "agent2"):
        assert final(result, agent, "own_coin_probability")["mean"] > 0.8


def test_z_sweep_plateaus(tmp_path):
    result = run(tmp_path, experiment="z_sweep", z_values=[1, 2, 5, 10, 20])
    medians = [
        median_epochs_to_cooperation(epochs_to_cooperation_per_seed(result.sweep[z]))
        for z in (1, 2, 5, 10, 20)
    ]
    assert all(m is not None for m in medians[1:])
    finite = [np.inf if m is None else m for m in medians]
    assert all(a >= b for a, b in zip(finite[:4], finite[1:4]))
    assert abs(finite[4] - finite[3]) < 0.1 * finite[3]
