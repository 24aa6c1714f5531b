"""Pure-strategy equilibrium analysis on finite strategy sets and parameter
sweeps over the game configuration."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import brentq

from .engine import (
    COOPERATE,
    DEFECT,
    GameConfig,
    PayoffPair,
    Strategy,
    payoff_matrix,
    play,
)
from .noise import Player

DEFAULT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class FiniteGame:
    """A bimatrix game: ``alice[i, j]`` and ``bob[i, j]`` are the payoffs when
    Alice plays strategy ``i`` and Bob plays strategy ``j``."""

    strategies: tuple[Strategy, ...]
    alice: np.ndarray
    bob: np.ndarray

    def __post_init__(self):
        n = len(self.strategies)
        a = np.array(self.alice, dtype=float)
        b = np.array(self.bob, dtype=float)
        if n == 0 or a.shape != (n, n) or b.shape != (n, n):
            raise ValueError(f"payoff matrices must be {n}x{n} for {n} strategies")
        object.__setattr__(self, "strategies", tuple(self.strategies))
        object.__setattr__(self, "alice", a)
        object.__setattr__(self, "bob", b)

    @classmethod
    def from_payoffs(cls, strategies: Sequence[Strategy], payoffs: Sequence[Sequence[PayoffPair]]):
        a = [[pair.alice for pair in row] for row in payoffs]
        b = [[pair.bob for pair in row] for row in payoffs]
        return cls(tuple(strategies), a, b)

    @classmethod
    def from_config(cls, config: GameConfig, strategies: Sequence[Strategy]) -> "FiniteGame":
        return cls.from_payoffs(strategies, payoff_matrix(config, strategies))

    @property
    def n(self) -> int:
        return len(self.strategies)

    @property
    def labels(self) -> list[str]:
        return [s.label for s in self.strategies]

    def pair(self, i: int, j: int) -> PayoffPair:
        return PayoffPair(float(self.alice[i, j]), float(self.bob[i, j]))

    def profile_labels(self, profiles: Iterable[tuple[int, int]]) -> list[tuple[str, str]]:
        lab = self.labels
        return [(lab[i], lab[j]) for i, j in profiles]


def best_response(game: FiniteGame, player: Player | str, opponent: int,
                  tol: float = DEFAULT_TOL) -> set[int]:
    """Strategies of ``player`` within ``tol`` of the best payoff against ``opponent``."""
    player = Player(player)
    if not 0 <= opponent < game.n:
        raise ValueError(f"opponent strategy index {opponent} out of range")
    vals = game.alice[:, opponent] if player is Player.ALICE else game.bob[opponent, :]
    best = vals.max()
    return {int(k) for k in np.flatnonzero(vals >= best - tol)}


def nash_equilibria(game: FiniteGame, tol: float = DEFAULT_TOL) -> list[tuple[int, int]]:
    out = []
    for i, j in itertools.product(range(game.n), repeat=2):
        if game.alice[i, j] >= game.alice[:, j].max() - tol and \
                game.bob[i, j] >= game.bob[i, :].max() - tol:
            out.append((i, j))
    return out


def pareto_optimal(game: FiniteGame, tol: float = DEFAULT_TOL) -> list[tuple[int, int]]:
    """Profiles that no other profile Pareto-dominates.

    ``(k, l)`` dominates ``(i, j)`` when it improves one player by more than
    ``tol`` and lowers neither by more than ``tol``.
    """
    a, b = game.alice.ravel(), game.bob.ravel()
    out = []
    for idx in range(a.size):
        no_worse = (a >= a[idx] - tol) & (b >= b[idx] - tol)
        better = (a > a[idx] + tol) | (b > b[idx] + tol)
        if not np.any(no_worse & better):
            out.append(divmod(idx, game.n))
    return out


def dominant_strategy(game: FiniteGame, player: Player | str,
                      tol: float = DEFAULT_TOL) -> int | None:
    """First strategy that is a best response to every opponent strategy, if any."""
    common = set(range(game.n))
    for opp in range(game.n):
        common &= best_response(game, player, opp, tol)
    return min(common) if common else None


# --- sweeps -----------------------------------------------------------------

SWEEP_PARAMS = ("p", "p1", "p2", "r", "gamma", "thetaB", "alphaB")

_RANGES = {
    "p": (0.0, 1.0),
    "p1": (0.0, 1.0),
    "p2": (0.0, 1.0),
    "r": (0.0, math.pi / 4),
    "gamma": (0.0, math.pi / 2),
    "thetaB": (0.0, math.pi),
    "alphaB": (-math.pi, math.pi),
}


def param_range(name: str) -> tuple[float, float]:
    return _RANGES[name]


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if self.name not in SWEEP_PARAMS:
            raise ValueError(f"unknown sweep parameter {self.name!r}; expected one of {SWEEP_PARAMS}")
        if int(self.steps) < 1:
            raise ValueError(f"axis {self.name} needs at least one step")
        lo, hi = _RANGES[self.name]
        for v in (self.start, self.stop):
            if not (lo - 1e-12 <= v <= hi + 1e-12):
                raise ValueError(f"axis {self.name} bound {v!r} outside [{lo:g}, {hi:g}]")
        object.__setattr__(self, "steps", int(self.steps))

    def values(self) -> np.ndarray:
        if self.steps == 1:
            return np.array([float(self.start)])
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class SweepGrid:
    """Axes (first axis varies slowest), fixed parameter overrides and the
    strategy profiles to evaluate at every grid point."""

    axes: tuple[Axis, ...] = ()
    fixed: Mapping[str, float] = field(default_factory=dict)
    profiles: tuple[tuple[Strategy, Strategy], ...] = ((COOPERATE, COOPERATE),)

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        object.__setattr__(self, "profiles", tuple(tuple(p) for p in self.profiles))
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise ValueError("duplicate sweep axis")
        if "p" in names and ({"p1", "p2"} & set(names)):
            raise ValueError("axis p already sets p1 and p2")
        for k in self.fixed:
            if k not in SWEEP_PARAMS:
                raise ValueError(f"unknown fixed parameter {k!r}")
        if not self.profiles:
            raise ValueError("need at least one strategy profile")

    def __len__(self) -> int:
        return len(self.profiles) * int(np.prod([a.steps for a in self.axes], dtype=int))


@dataclass(frozen=True)
class SweepRecord:
    gamma: float
    r: float
    p1: float
    p2: float
    alice: Strategy
    bob: Strategy
    payoff: PayoffPair

    @property
    def labels(self) -> tuple[str, str]:
        return self.alice.label, self.bob.label


def _point_config(template: GameConfig, values: Mapping[str, float]) -> GameConfig:
    changes = {k: v for k, v in values.items() if k in ("p", "p1", "p2", "r", "gamma")}
    return template.replace(**changes) if changes else template


def _point_bob(bob: Strategy, values: Mapping[str, float]) -> Strategy:
    if "thetaB" not in values and "alphaB" not in values:
        return bob
    return Strategy(values.get("alphaB", bob.alpha), values.get("thetaB", bob.theta))


def sweep(template: GameConfig, grid: SweepGrid) -> list[SweepRecord]:
    """Evaluate every profile at every grid point.

    Records come profile by profile, and within a profile in row-major order
    of ``grid.axes``.
    """
    axis_values = [a.values() for a in grid.axes]
    names = [a.name for a in grid.axes]
    records = []
    for alice, bob in grid.profiles:
        for combo in itertools.product(*axis_values):
            values = dict(grid.fixed)
            values.update(zip(names, (float(v) for v in combo)))
            config = _point_config(template, values)
            b = _point_bob(bob, values)
            records.append(SweepRecord(config.gamma, config.r, config.noise.p1, config.noise.p2,
                                       alice, b, play(config, alice, b)))
    return records


def classical_profiles() -> tuple[tuple[Strategy, Strategy], ...]:
    cd = (COOPERATE, DEFECT)
    return tuple((a, b) for a in cd for b in cd)


def _equilibrium_gap(template: GameConfig, p: float) -> float:
    """Smallest off-diagonal payoff minus largest (C,C)/(D,D) payoff at p1 = p2 = p."""
    cfg = template.replace(p=p)
    cc, dd = play(cfg, COOPERATE, COOPERATE), play(cfg, DEFECT, DEFECT)
    cd, dc = play(cfg, COOPERATE, DEFECT), play(cfg, DEFECT, COOPERATE)
    return min(cd + dc) - max(cc + dd)


def equilibrium_crossing(template: GameConfig, steps: int = 101) -> float | None:
    """Decoherence level above which both (C,C) and (D,D) pay every player
    less than either off-diagonal classical profile.

    Returns the last upward zero crossing of the gap on ``[0, 1]`` refined by
    root bracketing, ``0.0`` if the gap is positive throughout, or ``None``
    if it does not stay positive up to ``p = 1``.
    """
    ps = np.linspace(0.0, 1.0, steps)
    gaps = np.array([_equilibrium_gap(template, p) for p in ps])
    if gaps[-1] <= 0:
        return None
    nonpos = np.flatnonzero(gaps <= 0)
    if nonpos.size == 0:
        return 0.0
    k = nonpos[-1]
    if gaps[k] == 0:
        return float(ps[k])
    return float(brentq(lambda p: _equilibrium_gap(template, p), ps[k], ps[k + 1], xtol=1e-14))
