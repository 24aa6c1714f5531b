"""Kraus channels and local amplitude damping on the two game qubits."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .qmat import DensityMatrix, as_cmatrix, dagger, tensor

COMPLETENESS_TOL = 1e-12


class Player(str, enum.Enum):
    ALICE = "alice"
    BOB = "bob"


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """A CPTP map given by Kraus operators; completeness is checked on construction."""

    operators: tuple[np.ndarray, ...]
    label: str = ""

    def __post_init__(self):
        ops = tuple(as_cmatrix(k) for k in self.operators)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if shape[0] != shape[1] or any(k.shape != shape for k in ops):
            raise ValueError("Kraus operators must be square and of equal size")
        object.__setattr__(self, "operators", ops)
        defect = self.completeness_defect()
        if defect >= COMPLETENESS_TOL:
            raise ValueError(f"Kraus operators of {self.label or 'channel'} are not complete "
                             f"(defect {defect:.3e})")

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def completeness_defect(self) -> float:
        total = sum(dagger(k) @ k for k in self.operators)
        return float(np.max(np.abs(total - np.eye(self.dim))))


def identity_channel(dim: int = 2) -> KrausChannel:
    return KrausChannel((np.eye(dim),), label="identity")


def check_p(p: float, name: str = "p") -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"decoherence parameter {name}={p!r} outside [0, 1]")
    return p


def amplitude_damping(p: float) -> KrausChannel:
    """Amplitude damping: ``K0 = diag(1, sqrt(1-p))``, ``K1 = sqrt(p) |0><1|``."""
    p = check_p(p)
    k0 = np.diag([1.0, math.sqrt(1.0 - p)])
    k1 = np.array([[0.0, math.sqrt(p)], [0.0, 0.0]])
    return KrausChannel((k0, k1), label=f"amplitude_damping({p:g})")


def lift_local(channel: KrausChannel, target: Player | str, n_qubits: int = 2) -> KrausChannel:
    """Embed a single-qubit channel on one player's qubit of the two-qubit game."""
    if n_qubits != 2:
        raise ValueError("only two-qubit lifting is supported")
    if channel.dim != 2:
        raise ValueError("expected a single-qubit channel")
    try:
        target = Player(target)
    except ValueError:
        raise ValueError(f"invalid target player {target!r}") from None
    eye = np.eye(2)
    if target is Player.ALICE:
        ops = tuple(tensor(k, eye) for k in channel.operators)
    else:
        ops = tuple(tensor(eye, k) for k in channel.operators)
    return KrausChannel(ops, label=f"{channel.label}@{target.value}")


def apply_channel(rho: DensityMatrix, channel: KrausChannel) -> DensityMatrix:
    if channel.dim != rho.dim:
        raise ValueError(f"channel acts on dimension {channel.dim}, state has {rho.dim}")
    m = rho.matrix
    out = sum(k @ m @ dagger(k) for k in channel.operators)
    return DensityMatrix(out, rho.dims)


@dataclass(frozen=True)
class DecoherenceParams:
    p1: float = 0.0  # Alice
    p2: float = 0.0  # Bob

    def __post_init__(self):
        object.__setattr__(self, "p1", check_p(self.p1, "p1"))
        object.__setattr__(self, "p2", check_p(self.p2, "p2"))

    @classmethod
    def uniform(cls, p: float) -> "DecoherenceParams":
        return cls(p, p)


def apply_two_local(
    rho: DensityMatrix,
    params: DecoherenceParams,
    channel: Callable[[float], KrausChannel] = amplitude_damping,
) -> DensityMatrix:
    """Independent local noise on both qubits, Alice's channel first.

    Equivalent to ``sum_ij E_i^A E_j^B rho E_j^B+ E_i^A+`` with independent
    indices. ``channel`` builds the single-qubit channel from a decoherence
    parameter.
    """
    if rho.dims != (2, 2):
        raise ValueError(f"expected a two-qubit state, got dims {rho.dims}")
    rho = apply_channel(rho, lift_local(channel(params.p1), Player.ALICE))
    return apply_channel(rho, lift_local(channel(params.p2), Player.BOB))


def compose(first: KrausChannel, second: KrausChannel) -> KrausChannel:
    """Channel applying ``first`` then ``second``."""
    ops: Sequence[np.ndarray] = [b @ a for a in first.operators for b in second.operators]
    return KrausChannel(tuple(ops), label=f"{second.label}*{first.label}")
