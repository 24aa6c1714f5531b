"""Noisy quantum Prisoners' Dilemma with one uniformly accelerated player."""

from .engine import (
    COOPERATE,
    DEFECT,
    MIRACLE,
    QUANTUM,
    ConsistencyError,
    GameConfig,
    PayoffPair,
    PayoffTable,
    Strategy,
    entangling_gate,
    payoff_matrix,
    play,
    run_pipeline,
    strategy_unitary,
)
from .noise import DecoherenceParams, KrausChannel, Player, amplitude_damping
from .qmat import DensityMatrix, check_density, partial_trace, tensor

__all__ = [
    "COOPERATE", "DEFECT", "MIRACLE", "QUANTUM",
    "ConsistencyError", "DecoherenceParams", "DensityMatrix", "GameConfig", "KrausChannel",
    "PayoffPair", "PayoffTable", "Player", "Strategy",
    "amplitude_damping", "check_density", "entangling_gate", "partial_trace", "payoff_matrix",
    "play", "run_pipeline", "strategy_unitary", "tensor",
]

__version__ = "0.1.0"
