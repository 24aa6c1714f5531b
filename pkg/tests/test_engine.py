import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from qpdgame.engine import (
    COOPERATE,
    DEFECT,
    MIRACLE,
    QUANTUM,
    ConsistencyError,
    GameConfig,
    PayoffTable,
    Strategy,
    _payoff_from_probabilities,
    entangling_gate,
    payoff_matrix,
    play,
    run_pipeline,
    strategy_unitary,
)

TABLE1 = {("C", "C"): (3, 3), ("C", "D"): (0, 5), ("D", "C"): (5, 0), ("D", "D"): (1, 1)}
CD = {"C": COOPERATE, "D": DEFECT}

alphas = st.floats(-math.pi, math.pi)
thetas = st.floats(0.0, math.pi)
unit = st.floats(0.0, 1.0)


# --- strategies and gates ---

def test_cooperate_is_identity():
    assert_allclose(strategy_unitary(COOPERATE), np.eye(2), atol=1e-15)


def test_quantum_move_is_diag_i_minus_i():
    assert_allclose(strategy_unitary(QUANTUM), np.diag([1j, -1j]), atol=1e-15)


def test_miracle_move():
    expected = 1j / math.sqrt(2) * np.array([[-1, 1], [1, 1]])
    assert_allclose(strategy_unitary(MIRACLE), expected, atol=1e-15)


def test_strategy_unitaries_are_unitary():
    rng = np.random.default_rng(4)
    for a, t in zip(rng.uniform(-math.pi, math.pi, 1000), rng.uniform(0, math.pi, 1000)):
        u = strategy_unitary(Strategy(a, t))
        assert np.max(np.abs(u @ u.conj().T - np.eye(2))) < 1e-13


@pytest.mark.parametrize("alpha, theta", [(3.2, 0.0), (0.0, -0.1), (0.0, 3.2)])
def test_strategy_range_checked(alpha, theta):
    with pytest.raises(ValueError):
        Strategy(alpha, theta)


def test_strategy_name_not_part_of_identity():
    assert Strategy(0.0, 0.0) == COOPERATE
    assert COOPERATE.label == "C"
    assert Strategy(0.5, 1.0).label == "(0.5,1)"


def test_entangling_gate_trivial_at_zero():
    assert_allclose(entangling_gate(0.0), np.eye(4), atol=0)


def test_entangling_gate_prepares_maximally_entangled_state():
    out = entangling_gate(math.pi / 2) @ np.array([1, 0, 0, 0])
    assert_allclose(out, np.array([1, 0, 0, -1j]) / math.sqrt(2), atol=1e-15)


def test_entangling_gate_unitary_and_symmetric():
    j = entangling_gate(math.pi / 3)
    assert np.max(np.abs(j @ j.conj().T - np.eye(4))) < 1e-13
    assert_allclose(j, j.T, atol=0)


# --- play ---

@pytest.mark.parametrize("profile", list(TABLE1))
def test_classical_game(profile):
    pay = play(GameConfig(), CD[profile[0]], CD[profile[1]])
    assert_allclose(pay, TABLE1[profile], atol=1e-12)


def test_unentangled_accelerated_defection():
    # unentangled closed form for (D, D) at r = pi/4: 3 - 2cos(pi/2) and cos^2(pi/4)
    assert_allclose(play(GameConfig.make(0.0, math.pi / 4), DEFECT, DEFECT), (3, 0.5), atol=1e-12)


def test_quantum_against_defect():
    assert_allclose(play(GameConfig.make(math.pi / 2), QUANTUM, DEFECT), (5, 0), atol=1e-12)


def test_quantum_against_cooperate_lands_on_mutual_defection():
    assert_allclose(play(GameConfig.make(math.pi / 2), QUANTUM, COOPERATE), (1, 1), atol=1e-12)


def test_play_matches_full_pipeline():
    rng = np.random.default_rng(8)
    for _ in range(200):
        g, r = rng.uniform(0, math.pi / 2), rng.uniform(0, math.pi / 4)
        p1, p2 = rng.random(2)
        a = Strategy(rng.uniform(-math.pi, math.pi), rng.uniform(0, math.pi))
        b = Strategy(rng.uniform(-math.pi, math.pi), rng.uniform(0, math.pi))
        cfg = GameConfig.make(g, r, p1, p2)
        assert_allclose(play(cfg, a, b), run_pipeline(cfg, a, b).payoff, atol=1e-13)


def test_pipeline_trace_shapes():
    trace = run_pipeline(GameConfig.make(1.0, 0.3, 0.2, 0.4), QUANTUM, DEFECT)
    dims = {k: v.dims for k, v in trace.stages().items()}
    assert dims == {"initial": (2, 2), "rindler": (2, 2, 2), "traced": (2, 2),
                    "noisy": (2, 2), "moved": (2, 2), "final": (2, 2)}
    assert abs(trace.probabilities.sum() - 1) < 1e-12


@given(st.floats(0, math.pi / 2), st.floats(0, math.pi / 4), unit, unit, alphas, thetas, alphas, thetas)
@settings(max_examples=150, deadline=None)
def test_outcomes_form_a_distribution_and_payoffs_are_bounded(g, r, p1, p2, aa, ta, ab, tb):
    trace = run_pipeline(GameConfig.make(g, r, p1, p2), Strategy(aa, ta), Strategy(ab, tb))
    d = trace.probabilities
    assert np.all(d >= -1e-12) and abs(d.sum() - 1) < 1e-12
    assert 0 <= trace.payoff.alice <= 5 and 0 <= trace.payoff.bob <= 5


@given(st.floats(0, math.pi / 2), unit, alphas, thetas, alphas, thetas)
@settings(max_examples=100, deadline=None)
def test_inertial_player_exchange_symmetry(g, p, aa, ta, ab, tb):
    cfg = GameConfig.make(g, 0.0, p, p)
    sa, sb = Strategy(aa, ta), Strategy(ab, tb)
    assert abs(play(cfg, sa, sb).alice - play(cfg, sb, sa).bob) < 1e-12


@given(st.floats(0, math.pi / 4), unit)
@settings(max_examples=100, deadline=None)
def test_entangled_classical_exchange_symmetry(r, p):
    cfg = GameConfig.make(math.pi / 2, r, p, p)
    for a in CD.values():
        for b in CD.values():
            assert abs(play(cfg, a, b).alice - play(cfg, b, a).bob) < 1e-12


def test_acceleration_breaks_exchange_symmetry():
    cfg = GameConfig.make(0.0, math.pi / 4)
    assert abs(play(cfg, COOPERATE, DEFECT).alice - play(cfg, DEFECT, COOPERATE).bob) > 0.1


@given(alphas, alphas, st.floats(0, math.pi / 2), st.floats(0, math.pi / 4), unit, unit)
@settings(max_examples=100, deadline=None)
def test_phase_irrelevant_at_full_flip(a1, a2, g, r, p1, p2):
    assert_allclose(strategy_unitary(Strategy(a1, math.pi)), strategy_unitary(Strategy(a2, math.pi)),
                    atol=1e-15)
    cfg = GameConfig.make(g, r, p1, p2)
    assert_allclose(play(cfg, Strategy(a1, math.pi), QUANTUM), play(cfg, Strategy(a2, math.pi), QUANTUM),
                    atol=1e-12)


def test_play_is_deterministic():
    cfg = GameConfig.make(0.9, 0.4, 0.3, 0.6)
    assert play(cfg, MIRACLE, DEFECT) == play(cfg, MIRACLE, DEFECT)


# --- payoff tables and configs ---

def test_payoff_matrix_classical():
    table = payoff_matrix(GameConfig(), [COOPERATE, DEFECT])
    for i, a in enumerate("CD"):
        for j, b in enumerate("CD"):
            assert_allclose(table[i][j], TABLE1[(a, b)], atol=1e-12)


@pytest.mark.parametrize("r", [0.0, math.pi / 16, math.pi / 8, 3 * math.pi / 16, math.pi / 4])
def test_payoff_matrix_full_decoherence_restores_table1(r):
    table = payoff_matrix(GameConfig.make(0.0, r, 0.0, 1.0), [COOPERATE, DEFECT])
    for i, a in enumerate("CD"):
        for j, b in enumerate("CD"):
            assert_allclose(table[i][j], TABLE1[(a, b)], atol=1e-10)


def test_payoff_matrix_singleton_and_empty():
    table = payoff_matrix(GameConfig(), [COOPERATE])
    assert len(table) == 1 and len(table[0]) == 1
    with pytest.raises(ValueError):
        payoff_matrix(GameConfig(), [])


def test_custom_payoff_table():
    table = PayoffTable(alice=(4, 0, 3, 1), bob=(4, 3, 0, 1))
    assert play(GameConfig.make(payoffs=table), COOPERATE, COOPERATE) == (4, 4)
    with pytest.raises(ValueError):
        PayoffTable(alice=(1, 2, 3))


def test_config_replace():
    cfg = GameConfig.make(0.5, 0.1, 0.2, 0.3)
    assert cfg.replace(p=0.9).noise.p1 == cfg.replace(p=0.9).noise.p2 == 0.9
    assert cfg.replace(r=0.2).gamma == 0.5
    with pytest.raises(TypeError):
        cfg.replace(beta=1)
    with pytest.raises(ValueError):
        GameConfig.make(r=1.0)


def test_bad_distribution_is_a_consistency_error():
    with pytest.raises(ConsistencyError):
        _payoff_from_probabilities(np.array([0.5, 0.5, 0.5, -0.5]), PayoffTable())
    with pytest.raises(ConsistencyError):
        _payoff_from_probabilities(np.array([0.5, 0.5, 0.5, 0.0]), PayoffTable())
