"""Analytic payoff formulas for the noisy noninertial Prisoners' Dilemma and
their cross-validation against the density-matrix pipeline.

Each formula is written out independently of :mod:`qpdgame.engine`; the
engine is treated as ground truth when the two disagree.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .engine import (
    COOPERATE,
    DEFECT,
    MIRACLE,
    PROFILES,
    QUANTUM,
    GameConfig,
    PayoffPair,
    Strategy,
    play,
)
from .noise import check_p
from .rindler import check_r


class Case(str, enum.Enum):
    TABLE2 = "table2"
    ENTANGLED_CLASSICAL = "e12"
    ALICE_Q = "e14"
    ALICE_M = "e16"


def check_profile(profile: str) -> str:
    profile = str(profile).upper()
    if profile not in PROFILES:
        raise ValueError(f"profile must be one of {PROFILES}, got {profile!r}")
    return profile


def table2_payoff(profile: str, p2: float, r: float) -> PayoffPair:
    """Unentangled start, classical moves; only Bob's noise matters."""
    profile = check_profile(profile)
    p2, r = check_p(p2, "p2"), check_r(r)
    s2 = math.sin(r) ** 2
    c2r = math.cos(2 * r)
    if profile == "CC":
        return PayoffPair(3 * (math.cos(r) ** 2 + p2 * s2), 4 - c2r - 2 * p2 * s2)
    if profile == "CD":
        return PayoffPair(3 * (1 - p2) * s2, 4 + c2r + 2 * p2 * s2)
    if profile == "DC":
        return PayoffPair(3 + 2 * c2r + 4 * p2 * s2, (1 - p2) * s2)
    return PayoffPair(3 - 2 * c2r - 4 * p2 * s2, math.cos(r) ** 2 + p2 * s2)


def entangled_classical_payoff(profile: str, p1: float, p2: float, r: float) -> PayoffPair:
    """Maximally entangled start (gamma = pi/2), classical moves."""
    profile = check_profile(profile)
    p1, p2, r = check_p(p1, "p1"), check_p(p2, "p2"), check_r(r)
    coh = math.sqrt((1 - p1) * (1 - p2)) * math.cos(r)
    tail = p2 * (1 / 8 - p1 / 2 + math.cos(2 * r) / 8)
    if profile in ("CC", "DD"):
        sign = 1.0 if profile == "CC" else -1.0
        val = 17 / 8 + p1 / 4 + sign * coh - math.cos(2 * r) / 8 + tail
        return PayoffPair(val, val)
    low = 19 / 8 - p1 / 4 - 2.5 * coh + math.cos(2 * r) / 8 - tail    # the cooperator's payoff
    high = 19 / 8 - p1 / 4 + 2.5 * coh + math.cos(2 * r) / 8 - tail   # the defector's payoff
    return PayoffPair(low, high) if profile == "CD" else PayoffPair(high, low)


def alice_q_payoff(p: float, r: float, alpha_b: float, theta_b: float) -> PayoffPair:
    """Alice plays Q, Bob plays ``U(alpha_b, theta_b)``; gamma = pi/2, p1 = p2 = p."""
    p, r = check_p(p), check_r(r)
    ct = math.cos(theta_b)
    base = 18 - (1 - (3 - 4 * p) * p + (1 - p) * math.cos(2 * r)) * ct
    k = 2 * (1 - p) * math.cos(r)
    phase = 2 * math.cos(2 * alpha_b) * (1 + ct)
    alice = (base - k * (phase + 5 * ct - 5)) / 8
    bob = (base - k * (phase - 5 * ct + 5)) / 8
    return PayoffPair(alice, bob)


def alice_m_payoff(p: float, r: float, theta_b: float) -> PayoffPair:
    """Alice plays the miracle move, Bob plays ``U(0, theta_b)``; gamma = pi/2, p1 = p2 = p."""
    p, r = check_p(p), check_r(r)
    st = math.sin(theta_b)
    q = 1 + p * (4 * p - 3) + (1 - p) * math.cos(2 * r)
    k = (1 - p) * math.cos(r)
    alice = (3.5 * q * st + k * (st + 3) + 9) / 4
    bob = (-1.5 * q * st + k * (st - 7) + 9) / 4
    return PayoffPair(alice, bob)


_CLASSICAL = {"C": COOPERATE, "D": DEFECT}

# Parameters each case is a function of, in grid order.
CASE_PARAMS: dict[Case, tuple[str, ...]] = {
    Case.TABLE2: ("profile", "p2", "r"),
    Case.ENTANGLED_CLASSICAL: ("profile", "p1", "p2", "r"),
    Case.ALICE_Q: ("p", "r", "alphaB", "thetaB"),
    Case.ALICE_M: ("p", "r", "thetaB"),
}


def _lin(start: float, stop: float, n: int) -> list[float]:
    if n == 1:
        return [start]
    return [start + (stop - start) * k / (n - 1) for k in range(n)]


def default_grid(case: Case | str) -> dict[str, list]:
    case = Case(case)
    r_axis = _lin(0.0, math.pi / 4, 5)
    if case is Case.TABLE2:
        return {"profile": list(PROFILES), "p2": _lin(0.0, 1.0, 11), "r": r_axis}
    if case is Case.ENTANGLED_CLASSICAL:
        return {"profile": list(PROFILES), "p1": _lin(0.0, 1.0, 6), "p2": _lin(0.0, 1.0, 6),
                "r": r_axis}
    if case is Case.ALICE_Q:
        return {"p": _lin(0.0, 1.0, 6), "r": r_axis,
                "alphaB": [-math.pi / 2, 0.0, math.pi / 2], "thetaB": _lin(0.0, math.pi, 5)}
    return {"p": _lin(0.0, 1.0, 6), "r": r_axis, "thetaB": _lin(0.0, math.pi, 5)}


def evaluate_case(case: Case | str, point: Mapping[str, object]) -> tuple[PayoffPair, PayoffPair]:
    """Return ``(closed_form, engine)`` payoffs at one parameter point."""
    case = Case(case)
    if case is Case.TABLE2:
        prof = check_profile(point["profile"])
        closed = table2_payoff(prof, point["p2"], point["r"])
        config = GameConfig.make(0.0, point["r"], 0.0, point["p2"])
        return closed, play(config, _CLASSICAL[prof[0]], _CLASSICAL[prof[1]])
    if case is Case.ENTANGLED_CLASSICAL:
        prof = check_profile(point["profile"])
        closed = entangled_classical_payoff(prof, point["p1"], point["p2"], point["r"])
        config = GameConfig.make(math.pi / 2, point["r"], point["p1"], point["p2"])
        return closed, play(config, _CLASSICAL[prof[0]], _CLASSICAL[prof[1]])
    config = GameConfig.make(math.pi / 2, point["r"], point["p"], point["p"])
    if case is Case.ALICE_Q:
        closed = alice_q_payoff(point["p"], point["r"], point["alphaB"], point["thetaB"])
        return closed, play(config, QUANTUM, Strategy(point["alphaB"], point["thetaB"]))
    closed = alice_m_payoff(point["p"], point["r"], point["thetaB"])
    return closed, play(config, MIRACLE, Strategy(0.0, point["thetaB"]))


@dataclass(frozen=True)
class DeviationEntry:
    index: int
    point: dict
    closed: PayoffPair
    engine: PayoffPair

    @property
    def deviation(self) -> float:
        return max(abs(self.closed.alice - self.engine.alice), abs(self.closed.bob - self.engine.bob))


@dataclass(frozen=True)
class DeviationReport:
    case: Case
    tol: float
    entries: list[DeviationEntry] = field(repr=False)

    @property
    def max_deviation(self) -> float:
        return max(e.deviation for e in self.entries)

    @property
    def argmax(self) -> DeviationEntry:
        return max(self.entries, key=lambda e: e.deviation)

    @property
    def passed(self) -> bool:
        return self.max_deviation < self.tol

    def __len__(self) -> int:
        return len(self.entries)


def grid_points(names: Sequence[str], grid: Mapping[str, Iterable]) -> list[dict]:
    axes = [list(grid[n]) for n in names]
    return [dict(zip(names, combo)) for combo in itertools.product(*axes)]


def cross_validate(
    case: Case | str,
    grid: Mapping[str, Iterable] | None = None,
    tol: float = 1e-10,
) -> DeviationReport:
    """Evaluate the closed form and the engine at every grid point.

    ``grid`` maps parameter names to value lists; parameters the case needs
    but ``grid`` omits come from :func:`default_grid`. Entries are in
    row-major order of the case's parameter list.
    """
    case = Case(case)
    names = CASE_PARAMS[case]
    full = default_grid(case)
    if grid:
        unknown = set(grid) - set(names)
        if unknown:
            raise ValueError(f"case {case.value} has no parameter(s) {sorted(unknown)}; "
                             f"expected {names}")
        full.update({k: list(v) for k, v in grid.items()})
    points = grid_points(names, full)
    if not points:
        raise ValueError("grid is empty")
    entries = []
    for i, pt in enumerate(points):
        closed, engine = evaluate_case(case, pt)
        entries.append(DeviationEntry(i, pt, closed, engine))
    return DeviationReport(case, tol, entries)


def closed_form_for(config: GameConfig, alice: Strategy, bob: Strategy) -> PayoffPair | None:
    """The closed form covering this configuration and profile, if any.

    Only the default payoff table is covered.
    """
    if config.payoffs != GameConfig().payoffs:
        return None
    p1, p2 = config.noise.p1, config.noise.p2
    classical = {COOPERATE: "C", DEFECT: "D"}
    if alice in classical and bob in classical:
        prof = classical[alice] + classical[bob]
        if config.gamma == 0.0:
            return table2_payoff(prof, p2, config.r)
        if config.gamma == math.pi / 2:
            return entangled_classical_payoff(prof, p1, p2, config.r)
        return None
    if config.gamma != math.pi / 2 or p1 != p2:
        return None
    if alice == QUANTUM:
        return alice_q_payoff(p1, config.r, bob.alpha, bob.theta)
    if alice == MIRACLE and bob.alpha == 0.0:
        return alice_m_payoff(p1, config.r, bob.theta)
    return None
