"""Quantum Prisoners' Dilemma pipeline: shared entangled state, Unruh mixing of
Bob's qubit, local amplitude damping, the players' moves, disentangling gate
and payoff readout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .noise import DecoherenceParams, KrausChannel, amplitude_damping, apply_two_local
from .qmat import DensityMatrix, dagger, partial_trace, tensor
from .rindler import check_gamma, check_r, initial_minkowski_state, to_rindler

PROB_TOL = 1e-12

# D operator of the entangling gate; (D (x) D)^2 = I.
_D_OP = np.array([[0.0, 1j], [1j, 0.0]])
_DD = np.kron(_D_OP, _D_OP)


class ConsistencyError(RuntimeError):
    """An internal invariant of the pipeline was violated."""


@dataclass(frozen=True)
class Strategy:
    """A two-parameter move ``U(alpha, theta)``."""

    alpha: float
    theta: float
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        alpha, theta = float(self.alpha), float(self.theta)
        if not (-math.pi - 1e-12 <= alpha <= math.pi + 1e-12):
            raise ValueError(f"alpha={alpha!r} outside [-pi, pi]")
        if not (-1e-12 <= theta <= math.pi + 1e-12):
            raise ValueError(f"theta={theta!r} outside [0, pi]")
        object.__setattr__(self, "alpha", min(max(alpha, -math.pi), math.pi))
        object.__setattr__(self, "theta", min(max(theta, 0.0), math.pi))

    @property
    def label(self) -> str:
        return self.name if self.name else f"({self.alpha:.6g},{self.theta:.6g})"


COOPERATE = Strategy(0.0, 0.0, "C")
DEFECT = Strategy(0.0, math.pi, "D")
QUANTUM = Strategy(math.pi / 2, 0.0, "Q")
MIRACLE = Strategy(-math.pi / 2, math.pi / 2, "M")

NAMED_STRATEGIES = {s.name: s for s in (COOPERATE, DEFECT, QUANTUM, MIRACLE)}

# Outcome order on the diagonal of the final state: |00>, |01>, |10>, |11>.
PROFILES = ("CC", "CD", "DC", "DD")


@dataclass(frozen=True)
class PayoffTable:
    """Classical rewards per outcome, ordered ``(CC, CD, DC, DD)``."""

    alice: tuple[float, float, float, float] = (3.0, 0.0, 5.0, 1.0)
    bob: tuple[float, float, float, float] = (3.0, 5.0, 0.0, 1.0)

    def __post_init__(self):
        for who in ("alice", "bob"):
            vals = tuple(float(v) for v in getattr(self, who))
            if len(vals) != 4 or not all(math.isfinite(v) for v in vals):
                raise ValueError(f"{who} payoffs must be four finite numbers")
            object.__setattr__(self, who, vals)

    def bounds(self, player: str) -> tuple[float, float]:
        vals = getattr(self, player)
        return min(vals), max(vals)


class PayoffPair(NamedTuple):
    alice: float
    bob: float


@dataclass(frozen=True)
class GameConfig:
    gamma: float = 0.0
    r: float = 0.0
    noise: DecoherenceParams = DecoherenceParams()
    payoffs: PayoffTable = PayoffTable()

    def __post_init__(self):
        object.__setattr__(self, "gamma", check_gamma(self.gamma))
        object.__setattr__(self, "r", check_r(self.r))

    @classmethod
    def make(cls, gamma=0.0, r=0.0, p1=0.0, p2=0.0, payoffs: PayoffTable | None = None):
        return cls(gamma, r, DecoherenceParams(p1, p2), payoffs or PayoffTable())

    def replace(self, **changes) -> "GameConfig":
        """Copy with any of ``gamma, r, p, p1, p2, payoffs`` changed."""
        p1 = changes.pop("p1", self.noise.p1)
        p2 = changes.pop("p2", self.noise.p2)
        if "p" in changes:
            p1 = p2 = changes.pop("p")
        gamma = changes.pop("gamma", self.gamma)
        r = changes.pop("r", self.r)
        payoffs = changes.pop("payoffs", self.payoffs)
        if changes:
            raise TypeError(f"unknown config fields {sorted(changes)}")
        return GameConfig(gamma, r, DecoherenceParams(p1, p2), payoffs)


def strategy_unitary(s: Strategy) -> np.ndarray:
    c, sn = math.cos(s.theta / 2), math.sin(s.theta / 2)
    return np.array(
        [[np.exp(1j * s.alpha) * c, 1j * sn],
         [1j * sn, np.exp(-1j * s.alpha) * c]]
    )


def entangling_gate(gamma: float) -> np.ndarray:
    """``J = exp(i gamma/2 D(x)D) = cos(gamma/2) I + i sin(gamma/2) D(x)D``."""
    gamma = check_gamma(gamma)
    return math.cos(gamma / 2) * np.eye(4) + 1j * math.sin(gamma / 2) * _DD


@dataclass(frozen=True)
class PipelineTrace:
    """Every intermediate state of one game, in pipeline order."""

    initial: DensityMatrix
    rindler: DensityMatrix      # (Alice, Bob_I, Bob_II) before tracing region II
    traced: DensityMatrix
    noisy: DensityMatrix
    moved: DensityMatrix
    final: DensityMatrix
    probabilities: np.ndarray
    payoff: PayoffPair

    def stages(self) -> dict[str, DensityMatrix]:
        return {
            "initial": self.initial,
            "rindler": self.rindler,
            "traced": self.traced,
            "noisy": self.noisy,
            "moved": self.moved,
            "final": self.final,
        }


def _payoff_from_probabilities(d: np.ndarray, table: PayoffTable) -> PayoffPair:
    if np.any(d < -PROB_TOL) or abs(d.sum() - 1.0) >= PROB_TOL:
        raise ConsistencyError(f"outcome probabilities {d!r} are not a distribution")
    pair = PayoffPair(float(np.dot(table.alice, d)), float(np.dot(table.bob, d)))
    for who, val in zip(("alice", "bob"), pair):
        lo, hi = table.bounds(who)
        if not (lo - 1e-9 <= val <= hi + 1e-9):
            raise ConsistencyError(f"{who} payoff {val} outside table range [{lo}, {hi}]")
    return pair


def run_pipeline(
    config: GameConfig,
    alice: Strategy,
    bob: Strategy,
    damping: Callable[[float], KrausChannel] = amplitude_damping,
) -> PipelineTrace:
    """Run one game and keep every intermediate state."""
    initial = initial_minkowski_state(config.gamma)
    lifted = to_rindler(initial, config.r)
    traced = partial_trace(lifted, keep=(0, 1))
    noisy = apply_two_local(traced, config.noise, channel=damping)
    moved = noisy.conjugate_by(tensor(strategy_unitary(alice), strategy_unitary(bob)))
    final = moved.conjugate_by(dagger(entangling_gate(config.gamma)))
    d = final.diagonal()
    payoff = _payoff_from_probabilities(d, config.payoffs)
    return PipelineTrace(initial, lifted, traced, noisy, moved, final, d, payoff)


def play(
    config: GameConfig,
    alice: Strategy,
    bob: Strategy,
    damping: Callable[[float], KrausChannel] = amplitude_damping,
) -> PayoffPair:
    """Expected payoffs ``(P_A, P_B)`` for one strategy profile.

    Same steps as :func:`run_pipeline` on raw arrays, without keeping the
    intermediate states; a non-default ``damping`` goes through the full path.
    """
    if damping is not amplitude_damping:
        return run_pipeline(config, alice, bob, damping).payoff
    g, r = config.gamma, config.r
    ket = np.array([math.cos(g / 2), 0.0, 0.0, -1j * math.sin(g / 2)])
    c, s = math.cos(r), math.sin(r)
    # Bob's qubit -> (I, II) modes, then trace region II.
    iso = np.array([[c, 0.0], [0.0, 0.0], [0.0, 1.0], [s, 0.0]])
    psi = np.kron(np.eye(2), iso) @ ket
    t = psi.reshape(4, 2)
    rho = t @ np.conj(t.T)
    for p, side in ((config.noise.p1, 0), (config.noise.p2, 1)):
        k0 = np.diag([1.0, math.sqrt(1.0 - p)])
        k1 = np.array([[0.0, math.sqrt(p)], [0.0, 0.0]])
        ops = [np.kron(k, np.eye(2)) if side == 0 else np.kron(np.eye(2), k) for k in (k0, k1)]
        rho = sum(k @ rho @ k.T for k in ops)
    u = np.kron(strategy_unitary(alice), strategy_unitary(bob))
    j = entangling_gate(g)
    v = np.conj(j.T) @ u
    final = v @ rho @ np.conj(v.T)
    return _payoff_from_probabilities(np.real(np.diag(final)), config.payoffs)


def payoff_matrix(config: GameConfig, strategies: Sequence[Strategy]) -> list[list[PayoffPair]]:
    """Entry ``[i][j]`` is ``play(config, strategies[i], strategies[j])``."""
    if not strategies:
        raise ValueError("need at least one strategy")
    return [[play(config, a, b) for b in strategies] for a in strategies]
