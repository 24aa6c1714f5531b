"""Shared initial state and its Rindler-frame description for the accelerated
player.

Alice stays inertial; only Bob's qubit is mapped into Rindler modes (single
mode approximation). The three-subsystem intermediate is ordered
``(Alice, Bob_I, Bob_II)`` and region II is always subsystem 2.
"""

from __future__ import annotations

import math

import numpy as np

from .qmat import DensityMatrix, partial_trace, tensor

R_MAX = math.pi / 4
GAMMA_MAX = math.pi / 2
_EPS = 1e-12


def check_r(r: float) -> float:
    r = float(r)
    if not (-_EPS <= r <= R_MAX + _EPS):
        raise ValueError(f"acceleration parameter r={r!r} outside [0, pi/4]")
    return min(max(r, 0.0), R_MAX)


def check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not (-_EPS <= gamma <= GAMMA_MAX + _EPS):
        raise ValueError(f"entanglement parameter gamma={gamma!r} outside [0, pi/2]")
    return min(max(gamma, 0.0), GAMMA_MAX)


def acceleration_to_r(a: float, omega: float, c: float = 299_792_458.0) -> float:
    """Dimensionless acceleration parameter for proper acceleration ``a``.

    ``cos r = (exp(-2*pi*omega*c/a) + 1)**-0.5``; ``a == 0`` gives ``r = 0``.
    """
    if a < 0:
        raise ValueError(f"acceleration must be non-negative, got {a!r}")
    if omega <= 0 or c <= 0:
        raise ValueError("omega and c must be positive")
    if a == 0:
        return 0.0
    return math.acos((math.exp(-2.0 * math.pi * omega * c / a) + 1.0) ** -0.5)


def initial_minkowski_state(gamma: float) -> DensityMatrix:
    """``cos(g/2)|00> - i sin(g/2)|11>`` as a two-qubit density matrix."""
    gamma = check_gamma(gamma)
    ket = np.zeros(4, dtype=complex)
    ket[0] = math.cos(gamma / 2)
    ket[3] = -1j * math.sin(gamma / 2)
    return DensityMatrix.from_ket(ket, (2, 2))


def rindler_isometry(r: float) -> np.ndarray:
    """4x2 isometry taking a Minkowski qubit to Rindler modes (I, II).

    ``|0>_M -> cos r |0>_I|0>_II + sin r |1>_I|1>_II`` and ``|1>_M -> |1>_I|0>_II``.
    """
    r = check_r(r)
    v = np.zeros((4, 2), dtype=complex)
    v[0b00, 0] = math.cos(r)
    v[0b11, 0] = math.sin(r)
    v[0b10, 1] = 1.0
    return v


def to_rindler(rho_m: DensityMatrix, r: float) -> DensityMatrix:
    """Lift a two-qubit state to ``(Alice, Bob_I, Bob_II)`` by transforming Bob's qubit."""
    if rho_m.dims != (2, 2):
        raise ValueError(f"expected a two-qubit state, got dims {rho_m.dims}")
    w = tensor(np.eye(2), rindler_isometry(r))
    return DensityMatrix(w @ rho_m.matrix @ np.conj(w.T), (2, 2, 2))


def to_rindler_traced(rho_m: DensityMatrix, r: float) -> DensityMatrix:
    """State over ``(Alice, Bob_I)`` after tracing out region II."""
    return partial_trace(to_rindler(rho_m, r), keep=(0, 1))
