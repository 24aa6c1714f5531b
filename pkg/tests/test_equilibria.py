import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from qpdgame.engine import COOPERATE, DEFECT, MIRACLE, QUANTUM, GameConfig, Strategy, play
from qpdgame.equilibria import (
    Axis,
    FiniteGame,
    SweepGrid,
    _equilibrium_gap,
    best_response,
    classical_profiles,
    dominant_strategy,
    equilibrium_crossing,
    nash_equilibria,
    pareto_optimal,
    sweep,
)

C, D, Q = 0, 1, 2
CD = [COOPERATE, DEFECT]
CDQ = [COOPERATE, DEFECT, QUANTUM]
ENTANGLED = math.pi / 2


def game(gamma=0.0, r=0.0, p1=0.0, p2=0.0, strategies=CD):
    return FiniteGame.from_config(GameConfig.make(gamma, r, p1, p2), strategies)


def all_equal_game(n):
    return FiniteGame([Strategy(0, k * math.pi / max(n - 1, 1)) for k in range(n)],
                      np.full((n, n), 2.0), np.full((n, n), 2.0))


# --- finite-game analysis ---

def test_classical_nash_is_mutual_defection():
    assert nash_equilibria(game()) == [(D, D)]


def test_fully_decohered_accelerated_nash():
    g = game(ENTANGLED, math.pi / 4, 1, 1)
    assert nash_equilibria(g) == [(C, D), (D, C)]
    assert g.profile_labels(nash_equilibria(g)) == [("C", "D"), ("D", "C")]


def test_one_by_one_game():
    g = game(strategies=[COOPERATE])
    assert nash_equilibria(g) == pareto_optimal(g) == [(0, 0)]
    assert dominant_strategy(g, "alice") == 0


def test_classical_pareto_set():
    assert pareto_optimal(game()) == [(C, C), (C, D), (D, C)]


def test_fully_decohered_accelerated_pareto():
    assert pareto_optimal(game(ENTANGLED, math.pi / 4, 1, 1)) == [(C, D), (D, C)]


def test_identical_pairs_are_all_pareto_optimal():
    assert len(pareto_optimal(all_equal_game(3))) == 9


def test_classical_dominance():
    g = game()
    assert dominant_strategy(g, "alice") == D
    assert dominant_strategy(g, "bob") == D


def test_no_dominant_strategy_with_quantum_move():
    assert dominant_strategy(game(ENTANGLED, strategies=CDQ), "alice") is None


def test_defection_dominates_unentangled_accelerated_game():
    assert dominant_strategy(game(0.0, math.pi / 6, 0.0, 0.5), "alice") == D


def test_best_response_to_defection_is_quantum():
    g = game(ENTANGLED, strategies=CDQ)
    assert_allclose(g.alice[:, D], [0, 1, 5], atol=1e-12)
    assert best_response(g, "alice", D) == {Q}


def test_best_response_classical_and_ties():
    assert best_response(game(), "alice", C) == {D}
    assert best_response(all_equal_game(3), "bob", 1) == {0, 1, 2}
    with pytest.raises(ValueError):
        best_response(game(), "alice", 5)


def test_finite_game_shape_check():
    with pytest.raises(ValueError):
        FiniteGame(CD, np.zeros((2, 3)), np.zeros((2, 2)))


@given(st.integers(1, 5), st.integers(0, 2**31 - 1))
@settings(max_examples=100, deadline=None)
def test_nash_profiles_are_mutual_best_responses(n, seed):
    rng = np.random.default_rng(seed)
    # small integer payoffs make ties common
    g = FiniteGame([Strategy(0, k * math.pi / 4) for k in range(n)],
                   rng.integers(0, 3, (n, n)), rng.integers(0, 3, (n, n)))
    for i, j in nash_equilibria(g):
        assert i in best_response(g, "alice", j)
        assert j in best_response(g, "bob", i)
    assert pareto_optimal(g)


# --- battery over engine-built games ---

@pytest.mark.parametrize("p2", np.linspace(0, 1, 5))
@pytest.mark.parametrize("r", np.linspace(0, math.pi / 4, 5))
def test_battery_a_defection_dominant_without_entanglement(p2, r):
    assert dominant_strategy(game(0.0, r, 0.0, p2), "alice") == D


@pytest.mark.parametrize("r", [0.0, math.pi / 8])
def test_battery_b_noiseless_entangled_dilemma(r):
    g = game(ENTANGLED, r)
    assert (C, C) in pareto_optimal(g)
    assert nash_equilibria(g) == [(D, D)]


def test_battery_c_quantum_pair_is_nash_and_pareto():
    g = game(ENTANGLED, strategies=CDQ)
    assert (Q, Q) in nash_equilibria(g)
    assert (Q, Q) in pareto_optimal(g)


def test_battery_d_nash_equals_pareto_when_fully_decohered():
    g = game(ENTANGLED, math.pi / 4, 1, 1)
    assert nash_equilibria(g) == pareto_optimal(g) == [(C, D), (D, C)]
    assert_allclose([g.pair(C, C), g.pair(C, D), g.pair(D, C), g.pair(D, D)],
                    [(2, 2), (2.5, 2.5), (2.5, 2.5), (2, 2)], atol=1e-12)


# --- sweeps ---

def test_axis_validation():
    with pytest.raises(ValueError):
        Axis("q", 0, 1, 3)
    with pytest.raises(ValueError):
        Axis("p", 0, 1, 0)
    with pytest.raises(ValueError):
        Axis("r", 0, 1, 3)
    assert_allclose(Axis("p", 0.3, 1, 1).values(), [0.3])


def test_grid_validation():
    with pytest.raises(ValueError):
        SweepGrid((Axis("p", 0, 1, 2), Axis("p", 0, 1, 2)))
    with pytest.raises(ValueError):
        SweepGrid((Axis("p", 0, 1, 2), Axis("p1", 0, 1, 2)))
    with pytest.raises(ValueError):
        SweepGrid(fixed={"z": 1.0})
    with pytest.raises(ValueError):
        SweepGrid(profiles=())


def test_sweep_over_decoherence_at_maximal_acceleration():
    template = GameConfig.make(ENTANGLED, math.pi / 4)
    grid = SweepGrid((Axis("p", 0, 1, 101),), profiles=classical_profiles())
    records = sweep(template, grid)
    assert len(records) == len(grid) == 404
    ends = [rec.payoff for rec in records if rec.p1 == 1.0]
    assert len(ends) == 4
    for pair in ends:
        assert any(np.allclose(pair, ref, atol=1e-12) for ref in [(2, 2), (2.5, 2.5)])


def test_sweep_miracle_against_bob_angle():
    template = GameConfig.make(ENTANGLED, math.pi / 6)
    grid = SweepGrid((Axis("p", 0, 1, 11), Axis("thetaB", 0, math.pi, 11)),
                     profiles=((MIRACLE, COOPERATE),))
    records = sweep(template, grid)
    assert len(records) == 121
    # row-major: thetaB varies fastest
    assert records[1].p1 == 0.0 and records[1].bob.theta == pytest.approx(math.pi / 10)
    for rec in records[-11:]:
        assert rec.p1 == 1.0
        if rec.bob.theta in (0.0, math.pi):
            assert_allclose(rec.payoff, (2.25, 2.25), atol=1e-12)


def test_single_point_sweep():
    template = GameConfig.make(0.7, 0.2)
    grid = SweepGrid((Axis("p2", 0.4, 0.4, 1),), fixed={"p1": 0.1}, profiles=((QUANTUM, DEFECT),))
    (rec,) = sweep(template, grid)
    assert rec.payoff == play(GameConfig.make(0.7, 0.2, 0.1, 0.4), QUANTUM, DEFECT)
    assert rec.labels == ("Q", "D")


def test_sweep_is_deterministic_and_profile_major():
    grid = SweepGrid((Axis("r", 0, math.pi / 4, 3),), profiles=classical_profiles())
    a = sweep(GameConfig(), grid)
    assert a == sweep(GameConfig(), grid)
    assert [rec.labels for rec in a[:3]] == [("C", "C")] * 3


def test_equilibrium_crossing_at_maximal_acceleration():
    template = GameConfig.make(ENTANGLED, math.pi / 4)
    p_star = equilibrium_crossing(template)
    assert p_star is not None and 0.8 < p_star < 0.9
    assert abs(_equilibrium_gap(template, p_star)) < 1e-10
    for p in np.linspace(p_star + 1e-6, 1, 50):
        assert _equilibrium_gap(template, p) > 0


def test_crossing_moves_up_without_acceleration():
    still = equilibrium_crossing(GameConfig.make(ENTANGLED, 0.0))
    assert equilibrium_crossing(GameConfig.make(ENTANGLED, math.pi / 4)) < still < 0.9


def test_no_crossing_without_entanglement():
    # fully decohered unentangled play is the classical table, where the cooperator gets 0
    assert equilibrium_crossing(GameConfig.make(0.0, math.pi / 4)) is None
