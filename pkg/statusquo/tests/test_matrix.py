import numpy as np
import pytest

from statusquo.envs import (
    PAYOFFS,
    GameKind,
    MatrixGame,
    MatrixGameBatch,
    MatrixState,
    Trajectory,
    batch_ndr,
    ndr,
    payoff,
)
from statusquo.envs.matrix import perspective, state_index
from statusquo.errors import DomainError, EpisodeCompleteError, RejectedInputError


def test_prisoners_dilemma_table():
    kind = GameKind.PRISONERS_DILEMMA
    assert payoff(kind, ("C", "C")) == (-1.0, -1.0)
    assert payoff(kind, ("C", "D")) == (-3.0, 0.0)
    assert payoff(kind, ("D", "C")) == (0.0, -3.0)
    assert payoff(kind, ("D", "D")) == (-2.0, -2.0)


def test_matching_pennies_and_stag_hunt_tables():
    assert payoff(GameKind.MATCHING_PENNIES, ("H", "H")) == (1.0, -1.0)
    assert payoff(GameKind.MATCHING_PENNIES, ("H", "T")) == (-1.0, 1.0)
    assert payoff(GameKind.STAG_HUNT, ("C", "C")) == (0.0, 0.0)
    assert payoff(GameKind.STAG_HUNT, ("C", "D")) == (-4.0, -1.0)
    assert payoff(GameKind.STAG_HUNT, ("D", "D")) == (-3.0, -3.0)


def test_symmetry_and_zero_sum():
    assert PAYOFFS[GameKind.PRISONERS_DILEMMA].is_symmetric()
    assert PAYOFFS[GameKind.STAG_HUNT].is_symmetric()
    assert PAYOFFS[GameKind.MATCHING_PENNIES].is_zero_sum()
    assert not PAYOFFS[GameKind.PRISONERS_DILEMMA].is_zero_sum()


@pytest.mark.parametrize("action", ["X", 2, -1, True])
def test_invalid_action(action):
    with pytest.raises(RejectedInputError):
        payoff(GameKind.PRISONERS_DILEMMA, (action, "C"))


def test_step_and_state_encoding():
    game = MatrixGame(GameKind.PRISONERS_DILEMMA)
    assert game.state.index == 0
    state, rewards = game.step(("C", "D"))
    assert rewards == (-3.0, 0.0)
    assert state.previous_joint_action == (0, 1)
    assert state.index == 2
    assert state.label(GameKind.PRISONERS_DILEMMA) == "CD"
    np.testing.assert_array_equal(state.encoding, [0, 0, 1, 0, 0])


def test_state_index_round_trip():
    for index in range(5):
        assert MatrixState.from_index(index).index == index
    np.testing.assert_array_equal(state_index(np.array([0, 0, 1, 1]), np.array([0, 1, 0, 1])), [1, 2, 3, 4])


def test_perspective_swaps_mixed_states():
    states = np.array([0, 1, 2, 3, 4])
    np.testing.assert_array_equal(perspective(states, 0), states)
    np.testing.assert_array_equal(perspective(states, 1), [0, 1, 3, 2, 4])


def test_episode_ends_after_horizon():
    game = MatrixGame(GameKind.STAG_HUNT, episode_length=3)
    for _ in range(3):
        game.step((0, 0))
    assert game.finished
    with pytest.raises(EpisodeCompleteError):
        game.step((0, 0))


def test_stationary_environment_repeats_joint_action():
    game = MatrixGame(GameKind.PRISONERS_DILEMMA, episode_length=6, stationarity=3)
    played = [game.step(joint)[0].previous_joint_action for joint in [(0, 0), (1, 1), (1, 0), (1, 1), (0, 1), (0, 0)]]
    assert played == [(0, 0), (0, 0), (0, 0), (1, 1), (1, 1), (1, 1)]


def test_batch_trajectory_rewards_follow_the_table():
    kind = GameKind.STAG_HUNT
    game = MatrixGameBatch(kind, 8, episode_length=12, stationarity=4)
    gen = np.random.default_rng(2)
    game.reset()
    while not game.finished:
        game.step(gen.integers(0, 2, 8), gen.integers(0, 2, 8))
    trajectory = game.trajectory()
    assert trajectory.states.shape == (8, 12)
    assert trajectory.horizon == 11
    np.testing.assert_array_equal(trajectory.decision_mask, np.arange(12) % 4 == 0)
    for episode in range(8):
        for t in range(12):
            joint = tuple(trajectory.joint_actions[episode, t])
            assert tuple(trajectory.rewards[episode, t]) == payoff(kind, joint)
            expected_state = 0 if t == 0 else state_index(*trajectory.joint_actions[episode, t - 1])
            assert trajectory.states[episode, t] == expected_state
    # Within each block of four steps the joint action never changes.
    blocks = trajectory.joint_actions.reshape(8, 3, 4, 2)
    np.testing.assert_array_equal(blocks, np.broadcast_to(blocks[:, :, :1], blocks.shape))


def test_single_game_trajectory_matches_steps():
    game = MatrixGame(GameKind.PRISONERS_DILEMMA, episode_length=3)
    for joint in [("C", "C"), ("D", "C"), ("D", "D")]:
        game.step(joint)
    trajectory = game.trajectory()
    np.testing.assert_array_equal(trajectory.states, [0, 1, 3])
    np.testing.assert_array_equal(trajectory.rewards_for(0), [-1.0, 0.0, -2.0])
    np.testing.assert_array_equal(trajectory.actions_for(1), [0, 0, 1])


@pytest.mark.parametrize("actions", [np.array([0, 2]), np.array([0])])
def test_batch_rejects_bad_actions(actions):
    game = MatrixGameBatch(GameKind.PRISONERS_DILEMMA, 2)
    with pytest.raises(RejectedInputError):
        game.step(actions, np.zeros_like(actions))


def test_misaligned_trajectory_rejected():
    with pytest.raises(RejectedInputError):
        Trajectory(GameKind.PRISONERS_DILEMMA, np.zeros(3), np.zeros((2, 2)), np.zeros((3, 2)))


def test_matching_pennies_ndr_is_zero_sum():
    gen = np.random.default_rng(11)
    table = PAYOFFS[GameKind.MATCHING_PENNIES].as_array()
    for gamma in (0.0, 0.5, 0.9, 0.96):
        a1, a2 = gen.integers(0, 2, size=(2, 200))
        rewards = table[a1, a2]
        assert ndr(rewards[:, 0], gamma) + ndr(rewards[:, 1], gamma) == 0.0


@pytest.mark.parametrize("value,expected", [(0.0, 0.0), (-2.0, -2.0 * (1 - 0.96 ** 200)), (-1.0, -(1 - 0.96 ** 200))])
def test_constant_stream_ndr(value, expected):
    assert ndr(np.full(200, value), 0.96) == pytest.approx(expected, abs=1e-12)


def test_ndr_bounds():
    gen = np.random.default_rng(5)
    rewards = gen.choice([-3.0, -2.0, -1.0, 0.0], size=(50, 200))
    scale = 1 - 0.96 ** 200
    values = batch_ndr(rewards, 0.96)
    assert np.all(values >= scale * -3.0 - 1e-12)
    assert np.all(values <= 1e-12)


@pytest.mark.parametrize("gamma", [-0.1, 1.0, 1.2])
def test_gamma_out_of_range(gamma):
    with pytest.raises(DomainError):
        ndr([1.0, 2.0], gamma)


def test_empty_reward_list():
    with pytest.raises(RejectedInputError):
        ndr([], 0.9)
