import itertools

import numpy as np
import pytest

from statusquo.envs import CoinGameBatch, GridState, PickEvent, observe, own_coin_probability, reset, step
from statusquo.envs.coin import coin_rewards, pick_counts
from statusquo.errors import RejectedInputError


def test_reward_table_exhaustive():
    expected = {
        # (red picks, blue picks, coin color): (red reward, blue reward)
        (False, False, 0): (0.0, 0.0),
        (False, False, 1): (0.0, 0.0),
        (True, False, 0): (1.0, 0.0),
        (True, False, 1): (1.0, -2.0),
        (False, True, 1): (0.0, 1.0),
        (False, True, 0): (-2.0, 1.0),
        (True, True, 0): (-1.0, 1.0),
        (True, True, 1): (1.0, -1.0),
    }
    for (red, blue, color), rewards in expected.items():
        got = coin_rewards(np.array([red]), np.array([blue]), np.array([color]))[0]
        assert tuple(got) == rewards


def test_reset_places_on_distinct_cells():
    gen = np.random.default_rng(0)
    for _ in range(50):
        state = reset(gen)
        assert len({state.red_pos, state.blue_pos, state.coin_pos}) == 3
        assert state.coin_color in ("red", "blue")


def test_reset_coin_color_is_fair():
    gen = np.random.default_rng(17)
    red = sum(reset(gen).coin_color == "red" for _ in range(10_000))
    assert red / 10_000 == pytest.approx(0.5, abs=0.02)


def test_random_movers_pick_own_coin_half_the_time():
    gen = np.random.default_rng(23)
    board = CoinGameBatch(200)
    board.reset(gen)
    own = np.zeros(2, dtype=np.int64)
    total = np.zeros(2, dtype=np.int64)
    for _ in range(200):
        result = board.step(gen.integers(0, 4, 200), gen.integers(0, 4, 200), gen)
        for i, picked in enumerate((result.red_picked, result.blue_picked)):
            counts = pick_counts(picked, result.picked_color, i)
            own[i] += counts[0]
            total[i] += counts[1]
    np.testing.assert_allclose(own / total, 0.5, atol=0.05)


def test_own_pick_and_respawn():
    state = GridState((0, 0), (2, 2), (0, 1), "red")
    new_state, event = step(state, ("right", "up"), np.random.default_rng(3))
    assert event == PickEvent("red", "red", (1.0, 0.0))
    assert new_state.red_pos == (0, 1)
    assert new_state.blue_pos == (1, 2)
    assert new_state.coin_pos not in (new_state.red_pos, new_state.blue_pos)


def test_cross_pick_penalizes_owner():
    state = GridState((0, 0), (2, 2), (1, 0), "blue")
    _, event = step(state, ("down", "left"), np.random.default_rng(3))
    assert event.picker == "red"
    assert event.rewards == (1.0, -2.0)


def test_simultaneous_pick():
    state = GridState((0, 0), (0, 2), (0, 1), "blue")
    _, event = step(state, ("right", "left"), np.random.default_rng(3))
    assert event.picker == "both"
    assert event.rewards == (1.0, -1.0)


def test_moves_off_grid_are_clamped():
    state = GridState((0, 0), (2, 2), (1, 1), "red")
    new_state, event = step(state, ("up", "down"), np.random.default_rng(0))
    assert new_state.red_pos == (0, 0)
    assert new_state.blue_pos == (2, 2)
    assert event.picker == "none"


def test_board_respawn_replaces_everything():
    gen = np.random.default_rng(8)
    state = GridState((0, 0), (2, 2), (0, 1), "red")
    new_state, _ = step(state, ("right", "up"), gen, respawn="board")
    assert len({new_state.red_pos, new_state.blue_pos, new_state.coin_pos}) == 3


def test_invalid_move():
    with pytest.raises(RejectedInputError):
        step(GridState((0, 0), (2, 2), (1, 1), "red"), ("jump", "up"), np.random.default_rng(0))


def test_observation_channels_follow_perspective():
    state = GridState((0, 0), (2, 2), (1, 1), "red")
    red = observe(state, "red")
    blue = observe(state, "blue")
    assert red.shape == (3, 3, 4)
    assert red[0, 0, 0] == 1 and red[2, 2, 1] == 1 and red[1, 1, 2] == 1
    assert blue[2, 2, 0] == 1 and blue[0, 0, 1] == 1 and blue[1, 1, 3] == 1
    for obs in (red, blue):
        assert obs[..., 0].sum() == 1 and obs[..., 1].sum() == 1
        assert sorted([obs[..., 2].sum(), obs[..., 3].sum()]) == [0, 1]


def test_batched_episode_keeps_invariants():
    gen = np.random.default_rng(21)
    board = CoinGameBatch(16)
    board.reset(gen)
    for _ in range(200):
        result = board.step(gen.integers(0, 4, 16), gen.integers(0, 4, 16), gen)
        expected = coin_rewards(result.red_picked, result.blue_picked, result.picked_color)
        np.testing.assert_array_equal(result.rewards, expected)
        for obs in (board.observe("red"), board.observe("blue")):
            assert np.all(obs[..., 0].sum(axis=(1, 2)) == 1)
            assert np.all(obs[..., 2:].sum(axis=(1, 2, 3)) == 1)
        coin = board.coin
        assert np.all(np.any(coin != board.red, axis=1) & np.any(coin != board.blue, axis=1))


def test_own_coin_probability():
    events = [
        PickEvent("red", "red"), PickEvent("red", "blue"), PickEvent("both", "red"),
        PickEvent("blue", "blue"), PickEvent("none", "red"),
    ]
    assert own_coin_probability(events, "red") == pytest.approx(2 / 3)
    assert own_coin_probability(events, "blue") == pytest.approx(0.5)
    assert own_coin_probability([PickEvent("none", "red")], "red") is None


def test_pick_counts():
    picked = np.array([True, True, False, True])
    colors = np.array([0, 1, 0, 0])
    assert pick_counts(picked, colors, 0) == (2, 3)


def test_single_board_matches_batch():
    states = [reset(np.random.default_rng(s)) for s in range(4)]
    moves = list(itertools.product(range(4), repeat=2))[:4]
    for state, (r, b) in zip(states, moves):
        single, _ = step(state, (r, b), np.random.default_rng(99))
        batch = CoinGameBatch.from_states([state])
        batch.step(np.array([r]), np.array([b]), np.random.default_rng(99))
        assert batch.to_states()[0] == single
