"""Small dense complex-matrix kernel: tensor products, partial traces and
density-matrix validity checks for systems of a few qubits.

Basis ordering is the computational basis with the first subsystem most
significant, so for two qubits ``|a b>`` has linear index ``2*a + b`` and for
three qubits ``|a b c>`` has index ``4*a + 2*b + c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10


def as_cmatrix(m) -> np.ndarray:
    """Coerce ``m`` to a finite 2-D complex array (copy, read-only)."""
    arr = np.array(m, dtype=complex)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    arr.flags.writeable = False
    return arr


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(m))


def tensor(a, b) -> np.ndarray:
    """Kronecker product; block ``(i, j)`` of the result is ``a[i, j] * b``."""
    return as_cmatrix(np.kron(as_cmatrix(a), as_cmatrix(b)))


def tensor_all(mats: Iterable) -> np.ndarray:
    mats = list(mats)
    if not mats:
        raise ValueError("need at least one matrix")
    out = as_cmatrix(mats[0])
    for m in mats[1:]:
        out = tensor(out, m)
    return out


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A density matrix over an ordered list of subsystems.

    Construction checks shape and finiteness only; physical validity
    (Hermitian, unit trace, PSD) is reported by :func:`check_density` or
    enforced by :meth:`validated`.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        m = as_cmatrix(self.matrix)
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"invalid subsystem dims {self.dims!r}")
        n = int(np.prod(dims))
        if m.shape != (n, n):
            raise ValueError(f"matrix shape {m.shape} does not match dims {dims}")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_ket(cls, ket: Sequence[complex], dims: Sequence[int]) -> "DensityMatrix":
        v = np.asarray(ket, dtype=complex).reshape(-1)
        return cls(np.outer(v, np.conj(v)), tuple(dims))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.matrix)).copy()

    def conjugate_by(self, op) -> "DensityMatrix":
        """Return ``op @ rho @ op^dagger`` over the same subsystems."""
        op = np.asarray(op, dtype=complex)
        return DensityMatrix(op @ self.matrix @ dagger(op), self.dims)

    def check(self, **tols) -> "DensityReport":
        return check_density(self.matrix, **tols)

    def validated(self, **tols) -> "DensityMatrix":
        """Return self, raising :class:`InvalidDensityMatrix` if any invariant fails."""
        report = self.check(**tols)
        if not report.valid:
            raise InvalidDensityMatrix(report.describe())
        return self


class InvalidDensityMatrix(ValueError):
    pass


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every subsystem not listed in ``keep``.

    Kept subsystems stay in their original relative order regardless of the
    order given in ``keep``.
    """
    n_sub = len(rho.dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep or len(keep) == n_sub:
        raise ValueError("keep must be a nonempty proper subset of the subsystems")
    if keep[0] < 0 or keep[-1] >= n_sub:
        raise ValueError(f"subsystem index out of range for dims {rho.dims}")

    t = rho.matrix.reshape(rho.dims + rho.dims)
    # Repeatedly contract the highest traced-out axis pair so earlier axis numbers stay valid.
    traced = [k for k in range(n_sub) if k not in keep]
    cur = n_sub
    for k in reversed(traced):
        t = np.trace(t, axis1=k, axis2=k + cur)
        cur -= 1
    kept_dims = tuple(rho.dims[k] for k in keep)
    n = int(np.prod(kept_dims))
    return DensityMatrix(t.reshape(n, n), kept_dims)


def hermitian_eigenvalues(m, tol: float = 1e-15, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.

    The input is symmetrised as ``(m + m^dagger)/2`` first. Returns the
    eigenvalues in ascending order.
    """
    a = np.array(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    a = 0.5 * (a + dagger(a))
    n = a.shape[0]
    scale = np.linalg.norm(a)
    if n == 1 or scale == 0.0:
        return np.sort(np.real(np.diag(a)))

    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a[offdiag])
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                app, aqq = a[p, p].real, a[q, q].real
                # Real symmetric rotation on [[app, mag], [mag, aqq]] after removing the phase.
                theta = (aqq - app) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = dagger(rot) @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    else:
        raise RuntimeError("Jacobi eigenvalue iteration did not converge")
    return np.sort(np.real(np.diag(a)))


@dataclass(frozen=True)
class DensityReport:
    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float
    eigenvalues: tuple[float, ...]
    hermitian_tol: float = HERMITIAN_TOL
    trace_tol: float = TRACE_TOL
    psd_tol: float = PSD_TOL

    @property
    def hermitian(self) -> bool:
        return self.hermiticity_defect < self.hermitian_tol

    @property
    def unit_trace(self) -> bool:
        return self.trace_defect < self.trace_tol

    @property
    def positive(self) -> bool:
        return self.min_eigenvalue >= -self.psd_tol

    @property
    def valid(self) -> bool:
        return self.hermitian and self.unit_trace and self.positive

    def describe(self) -> str:
        problems = []
        if not self.hermitian:
            problems.append(f"not Hermitian (defect {self.hermiticity_defect:.3e})")
        if not self.unit_trace:
            problems.append(f"trace defect {self.trace_defect:.3e}")
        if not self.positive:
            problems.append(f"negative eigenvalue {self.min_eigenvalue:.3e}")
        return "; ".join(problems) if problems else "valid"


def check_density(
    m,
    hermitian_tol: float = HERMITIAN_TOL,
    trace_tol: float = TRACE_TOL,
    psd_tol: float = PSD_TOL,
) -> DensityReport:
    """Measure how far ``m`` is from being a valid density matrix.

    Parameters
    ----------
    m : array_like
        Square complex matrix.
    hermitian_tol, trace_tol : float
        Thresholds on ``max|m - m^dagger|`` and ``|tr m - 1|``.
    psd_tol : float
        The smallest eigenvalue may be as low as ``-psd_tol``.

    Returns
    -------
    DensityReport
        Defects, eigenvalues and the derived ``valid`` flag.
    """
    m = as_cmatrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    herm = float(np.max(np.abs(m - dagger(m))))
    tr = float(abs(np.trace(m) - 1.0))
    eigs = hermitian_eigenvalues(m)
    return DensityReport(
        hermiticity_defect=herm,
        trace_defect=tr,
        min_eigenvalue=float(eigs[0]),
        eigenvalues=tuple(float(x) for x in eigs),
        hermitian_tol=hermitian_tol,
        trace_tol=trace_tol,
        psd_tol=psd_tol,
    )
