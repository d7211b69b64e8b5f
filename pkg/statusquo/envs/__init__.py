"""Game environments: iterated matrix games and the Coin Game."""

from .models import (
    GameKind,
    PayoffMatrix,
    MatrixState,
    Trajectory,
    GridState,
    PickEvent,
)
from .matrix import MatrixGame, MatrixGameBatch, PAYOFFS, batch_ndr, ndr, payoff
from .coin import CoinGameBatch, observe, own_coin_probability, reset, step

__all__ = [
    'GameKind',
    'PayoffMatrix',
    'MatrixState',
    'Trajectory',
    'GridState',
    'PickEvent',
    'MatrixGame',
    'MatrixGameBatch',
    'PAYOFFS',
    'batch_ndr',
    'ndr',
    'payoff',
    'CoinGameBatch',
    'observe',
    'own_coin_probability',
    'reset',
    'step',
]
