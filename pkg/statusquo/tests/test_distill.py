import json
from dataclasses import replace

import numpy as np
import pytest
from scipy.spatial.distance import cdist

from statusquo.config import config_from_dict
from statusquo.data.models import AGENTS, DistillConfig
from statusquo.distill.clustering import (
    agreement,
    cluster_embeddings,
    cluster_report,
    label_clusters,
    project_2d,
    purity,
)
from statusquo.distill.encoder import EMBEDDING_SIZE, build_encoder, embed, predict, train_encoder
from statusquo.distill.models import ClusterModel, SequenceDataset, StateSequence
from statusquo.distill.oracle import OraclePair, evaluate_oracle_solo, train_oracle
from statusquo.distill.pipeline import load_oracle_pair, run_gamedistill, save_distill_artifacts
from statusquo.distill.rollouts import collect_rollouts
from statusquo.distill.storage import load_dataset, load_model, save_dataset, save_model
from statusquo.envs.coin import MOVES, OBSERVATION_SHAPE, OTHER_COIN, OWN_COIN, SELF
from statusquo.errors import DegenerateInputError, RejectedInputError, StorageFormatError, UnresolvedLabelingError
from statusquo.experiments import runner
from statusquo.nn import forward
from statusquo.seeds import stream

from .conftest import make_dataset


@pytest.fixture(scope="module")
def collected():
    return collect_rollouts(stream(0, "distill1"), 80, "red", episode_length=30, boards=8)


def test_collection_size_and_labels(collected):
    assert len(collected) == 80
    assert collected.states.shape == (80, 3, *OBSERVATION_SHAPE)
    np.testing.assert_array_equal(collected.own_reward, 1.0)
    expected_opponent = np.where(collected.own_pick, 0.0, -2.0)
    np.testing.assert_array_equal(collected.opponent_reward, expected_opponent)


def test_collected_windows_end_next_to_the_coin(collected):
    last = collected.states[:, -1]
    coin_channel = np.where(collected.own_pick, OWN_COIN, OTHER_COIN)
    for row in range(len(collected)):
        me = np.argwhere(last[row, :, :, SELF] == 1)[0]
        coin = np.argwhere(last[row, :, :, coin_channel[row]] == 1)[0]
        assert np.abs(me - coin).sum() <= 1


def test_padded_windows_repeat_the_first_observation(collected):
    for row in np.flatnonzero(collected.padded):
        np.testing.assert_array_equal(collected.states[row, 0], collected.states[row, 1])


def test_collection_is_deterministic(collected):
    again = collect_rollouts(stream(0, "distill1"), 80, "red", episode_length=30, boards=8)
    np.testing.assert_array_equal(again.states, collected.states)
    np.testing.assert_array_equal(again.actions, collected.actions)


def test_blue_collection_uses_blue_perspective():
    blue = collect_rollouts(stream(1, "distill2"), 20, "blue", episode_length=30, boards=8)
    assert blue.agent == "blue"
    np.testing.assert_array_equal(blue.own_pick, blue.coin_color == 1)


def test_collection_rejects_bad_arguments():
    with pytest.raises(RejectedInputError):
        collect_rollouts(np.random.default_rng(0), 0)
    with pytest.raises(RejectedInputError):
        collect_rollouts(np.random.default_rng(0), 5, agent="green")


def test_state_sequence_shape_checked():
    with pytest.raises(RejectedInputError):
        StateSequence(np.zeros((2, *OBSERVATION_SHAPE)), [0, 0], 1.0, 0.0, "red")


def test_dataset_sequence_round_trip(small_dataset):
    seq = small_dataset.sequence(3)
    rebuilt = SequenceDataset.from_sequences("red", [small_dataset.sequence(i) for i in range(len(small_dataset))])
    np.testing.assert_array_equal(rebuilt.states, small_dataset.states)
    assert seq.own_pick == (small_dataset.coin_color[3] == 0)


def test_encoder_shapes(small_dataset, rng):
    encoder = build_encoder(rng)
    assert embed(encoder, small_dataset.sequence(0)).shape == (EMBEDDING_SIZE,)
    assert embed(encoder, small_dataset).shape == (len(small_dataset), EMBEDDING_SIZE)
    heads = predict(encoder, small_dataset)
    assert np.all((heads["red_probability"] > 0) & (heads["red_probability"] < 1))


def test_encoder_training_reduces_loss(small_dataset):
    encoder = train_encoder(small_dataset, 15, np.random.default_rng(2), lr=0.003, minibatch=8)
    assert len(encoder.loss_history) == 15
    assert encoder.loss_history[-1] < encoder.loss_history[0]


def test_encoder_rejects_empty_dataset(small_dataset):
    with pytest.raises(RejectedInputError):
        train_encoder(small_dataset.subset([]), 1, np.random.default_rng(0))


@pytest.mark.parametrize("method", ["agglomerative", "kmeans"])
def test_separated_blobs_are_pure(method):
    gen = np.random.default_rng(9)
    blobs = np.concatenate([gen.normal(0.0, 0.1, (30, 5)), gen.normal(5.0, 0.1, (30, 5))])
    truth = np.repeat([True, False], 30)
    model = cluster_embeddings(blobs, method, seed=0)
    assert purity(model.assignments, truth) == 1.0


def test_duplicated_points_are_degenerate():
    with pytest.raises(DegenerateInputError):
        cluster_embeddings(np.ones((10, 4)))


def test_labeling_follows_opponent_reward():
    dataset = make_dataset("red", [1, 1, 0, 0], [-2.0, -1.8, 0.0, 0.0])
    labeled = label_clusters(ClusterModel("kmeans", [0, 0, 1, 1]), dataset)
    assert labeled.cluster_labels == {0: "defect", 1: "cooperate"}
    np.testing.assert_array_equal(labeled.members("defect"), [0, 1])


def test_labeling_ignores_cluster_numbering():
    dataset = make_dataset("red", [1, 0, 1, 0, 0], [-2.0, 0.0, -2.0, 0.0, 0.0])
    first = label_clusters(ClusterModel("agglomerative", [0, 1, 0, 1, 1]), dataset)
    second = label_clusters(ClusterModel("agglomerative", [1, 0, 1, 0, 0]), dataset)
    for row in range(len(dataset)):
        assert (
            first.cluster_labels[first.assignments[row]]
            == second.cluster_labels[second.assignments[row]]
        )


def test_equal_means_are_unresolved():
    dataset = make_dataset("red", [0, 0, 0, 0], [0.0, 0.0, 0.0, 0.0])
    with pytest.raises(UnresolvedLabelingError):
        label_clusters(ClusterModel("agglomerative", [0, 1, 0, 1]), dataset)


def test_empty_cluster_is_degenerate():
    dataset = make_dataset("red", [1, 1, 0, 0], [-2.0, -1.8, 0.0, 0.0])
    with pytest.raises(DegenerateInputError):
        label_clusters(ClusterModel("kmeans", [0, 0, 0, 0]), dataset)


def test_cluster_report(small_dataset):
    truth_clusters = np.where(small_dataset.own_pick, 1, 0)
    labeled = label_clusters(ClusterModel("agglomerative", truth_clusters), small_dataset)
    report = cluster_report(labeled, small_dataset, ClusterModel("kmeans", 1 - truth_clusters))
    assert report.purity == 1.0
    assert report.method_agreement == 1.0
    assert report.sizes == {"defect": 10, "cooperate": 10}
    assert report.mean_opponent_reward["defect"] == -2.0


def test_agreement_and_projection():
    assert agreement([0, 0, 1, 1], [1, 1, 0, 0]) == 1.0
    assert agreement([0, 1, 0, 1], [0, 0, 0, 0]) == 0.5
    assert project_2d(np.random.default_rng(0).normal(size=(12, 6))).shape == (12, 2)


def _single_sequence():
    states = np.zeros((3, *OBSERVATION_SHAPE))
    for i, cell in enumerate([(0, 0), (1, 1), (2, 2)]):
        states[(i, *cell, SELF)] = 1.0
        states[i, 0, 2, OWN_COIN] = 1.0
    return StateSequence(states, [1, 3, 0], 1.0, 0.0, "red")


def test_oracle_memorizes_a_single_sequence():
    dataset = SequenceDataset.from_sequences("red", [_single_sequence()])
    oracle = train_oracle(dataset, "cooperation", np.random.default_rng(0), epochs=300, lr=0.01)
    assert oracle.training_accuracy >= 0.99
    np.testing.assert_array_equal(oracle.moves(dataset.states[0]), [1, 3, 0])


def test_l2_shrinks_oracle_parameters():
    dataset = SequenceDataset.from_sequences("red", [_single_sequence()])
    plain = train_oracle(dataset, "defection", np.random.default_rng(1), epochs=100, lr=0.01, l2=0.0)
    shrunk = train_oracle(dataset, "defection", np.random.default_rng(1), epochs=100, lr=0.01, l2=0.01)
    assert np.linalg.norm(shrunk.network.parameters) < np.linalg.norm(plain.network.parameters)


def test_oracle_rejects_empty_cluster(small_dataset):
    with pytest.raises(RejectedInputError):
        train_oracle(small_dataset.subset([]), "cooperation", np.random.default_rng(0))


def test_negative_transitions_suppress_the_logged_move():
    positives = SequenceDataset.from_sequences("red", [_single_sequence()])
    other_coin = _single_sequence().states.copy()
    other_coin[..., OTHER_COIN] = other_coin[..., OWN_COIN]
    other_coin[..., OWN_COIN] = 0.0
    negatives = SequenceDataset.from_sequences("red", [StateSequence(other_coin, [1, 3, 0], 1.0, -2.0, "blue")])
    oracle = train_oracle(
        positives, "cooperation", np.random.default_rng(0), epochs=300, lr=0.01, negatives=negatives
    )
    np.testing.assert_array_equal(oracle.moves(positives.states[0]), [1, 3, 0])
    scores = forward(oracle.network, negatives.states[0])
    assert np.all(scores[np.arange(3), [1, 3, 0]] < 0.1)


class RandomMover:
    role = None

    def __init__(self, seed):
        self.rng = np.random.default_rng(seed)

    def moves(self, observations):
        return self.rng.integers(0, len(MOVES), size=len(observations))


def test_color_blind_oracle_picks_both_colors_alike():
    report = evaluate_oracle_solo(RandomMover(5), 2000, np.random.default_rng(6))
    share = report.other_pick_rate / (report.own_pick_rate + report.other_pick_rate)
    assert share == pytest.approx(0.5, abs=0.05)


class GreedyOwnCoin:
    role = "cooperation"

    def moves(self, observations):
        out = []
        for obs in observations:
            me = np.argwhere(obs[..., SELF] == 1)[0]
            target = np.argwhere(obs[..., OWN_COIN] == 1)
            if len(target) == 0:
                out.append(0 if me[0] > 0 else 1)
                continue
            dr, dc = target[0] - me
            out.append(1 if dr > 0 else 0 if dr < 0 else 3 if dc > 0 else 2)
        return np.array(out)


def test_greedy_oracle_always_reaches_own_coin():
    report = evaluate_oracle_solo(GreedyOwnCoin(), 200, np.random.default_rng(0), max_steps=4)
    assert report.own_pick_rate == 1.0
    assert report.other_pick_rate < 1.0


def test_solo_rejects_zero_trials():
    with pytest.raises(RejectedInputError):
        evaluate_oracle_solo(GreedyOwnCoin(), 0, np.random.default_rng(0))


def test_dataset_storage_round_trip(tmp_path, collected):
    path = tmp_path / "red_dataset.npz"
    save_dataset(path, collected)
    loaded = load_dataset(path)
    assert loaded.agent == "red"
    for name in ("states", "actions", "own_reward", "opponent_reward", "coin_color", "padded"):
        np.testing.assert_array_equal(getattr(loaded, name), getattr(collected, name))


def test_model_storage_round_trip(tmp_path):
    dataset = SequenceDataset.from_sequences("red", [_single_sequence()])
    oracle = train_oracle(dataset, "cooperation", np.random.default_rng(0), epochs=2)
    save_model(tmp_path / "oracle.npz", oracle)
    loaded = load_model(tmp_path / "oracle.npz")
    assert loaded.role == "cooperation"
    assert loaded.network.parameters.tobytes() == oracle.network.parameters.tobytes()
    assert loaded.network.layers == oracle.network.layers


def test_loading_the_wrong_format(tmp_path, small_dataset):
    save_dataset(tmp_path / "data.npz", small_dataset)
    with pytest.raises(StorageFormatError):
        load_model(tmp_path / "data.npz")
    (tmp_path / "junk.npz").write_bytes(b"not an archive")
    with pytest.raises(StorageFormatError):
        load_dataset(tmp_path / "junk.npz")


def test_loading_an_unknown_version(tmp_path):
    header = json.dumps({"format": "statusquo-model", "version": 99})
    with open(tmp_path / "future.npz", "wb") as handle:
        np.savez(handle, header=np.array(header), parameters=np.zeros(3))
    with pytest.raises(StorageFormatError):
        load_model(tmp_path / "future.npz")


def test_pipeline_end_to_end(tmp_path):
    config = DistillConfig(
        dataset_size=60, encoder_epochs=2, oracle_epochs=2, minibatch=32, solo_trials=20
    )
    result = run_gamedistill("red", config, stream(0, "distill1"), episode_length=30)
    assert len(result.dataset) == 60
    assert result.clusters.is_labeled
    assert set(result.solo) == {"cooperation", "defection"}
    assert list(result.projection.columns) == ["x", "y", "cluster", "pick_type"]

    paths = save_distill_artifacts(result, tmp_path)
    assert all(path.exists() for path in paths.values())
    pair = load_oracle_pair(tmp_path, "red")
    assert isinstance(pair, OraclePair)
    assert load_oracle_pair(tmp_path, "blue") is None
    obs = result.dataset.states[:5, -1]
    np.testing.assert_array_equal(pair.moves(obs, np.zeros(5)), result.oracles.cooperation.moves(obs))


@pytest.fixture(scope="module")
def distilled():
    config = DistillConfig(dataset_size=60, encoder_epochs=2, oracle_epochs=2, minibatch=32, solo_trials=20)
    return run_gamedistill("red", config, stream(0, "distill1"), episode_length=30)


def test_saved_oracles_need_a_matching_manifest(tmp_path, distilled):
    save_distill_artifacts(distilled, tmp_path, {"root_seed": 0})
    assert load_oracle_pair(tmp_path, "red", {"root_seed": 0}) is not None
    assert load_oracle_pair(tmp_path, "red", {"root_seed": 1}) is None
    (tmp_path / "red_distill_manifest.json").unlink()
    assert load_oracle_pair(tmp_path, "red", {"root_seed": 0}) is None


def test_runner_redistills_when_the_root_seed_changes(tmp_path, monkeypatch, distilled):
    first = config_from_dict({"experiment": "coin_sq", "seeds": "0", "output_dir": str(tmp_path)})
    for color in ("red", "blue"):
        directory = tmp_path / runner.DISTILL_DIR
        save_distill_artifacts(replace(distilled, agent=color), directory, first.distill_fingerprint())
    calls = []

    def fake_distill(config, threads=1):
        calls.append(config.seeds[0])
        return {agent: distilled for agent in AGENTS}

    monkeypatch.setattr(runner, "run_distill", fake_distill)
    saved = runner._oracles_for(first, 1, {})
    assert calls == []
    second = config_from_dict({"experiment": "coin_sq", "seeds": "1", "output_dir": str(tmp_path)})
    runner._oracles_for(second, 1, {})
    assert calls == [1]

    single = SequenceDataset.from_sequences("red", [_single_sequence()])
    other = OraclePair(
        train_oracle(single, "cooperation", np.random.default_rng(3), epochs=1),
        train_oracle(single, "defection", np.random.default_rng(4), epochs=1),
    )
    assert runner.run_digest(first, saved) != runner.run_digest(first, (other, saved[1]))


@pytest.mark.slow
def test_full_scale_distill_separates_behaviors():
    result = run_gamedistill("red", DistillConfig(), stream(0, "distill1"))
    assert result.report.purity > 0.95
    assert result.report.method_agreement > 0.9
    assert result.solo["cooperation"].other_pick_rate < 0.2
    assert result.solo["defection"].other_pick_rate > 0.9
    assert result.holdout_color_accuracy > 0.95

    embeddings = embed(result.encoder, result.dataset)
    groups = [embeddings[result.clusters.members(label)] for label in ("cooperate", "defect")]
    intra = np.mean([cdist(group, group, "cosine").mean() for group in groups])
    inter = cdist(groups[0], groups[1], "cosine").mean()
    assert intra < inter
