"""Density matrices, l1-coherence and the comparison matrix.

The comparison matrix of a state ``rho`` is

    A = D^{-1/2} |rho| D^{-1/2},

where ``|rho|`` is the entrywise modulus and ``D^{-1/2}`` the diagonal
matrix with entries ``rho_ii^{-1/2}`` on the support of the diagonal and
zero elsewhere. Its largest eigenvalue minus one is the largest l1-coherence
reachable from ``rho`` with a stochastic strictly incoherent operation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotHermitian, NotPSD, NotSquare, NotUnitTrace

DEFAULT_TOL = 1e-10


def as_square_matrix(m) -> np.ndarray:
    """Return ``m`` as a complex d x d array, raising ``NotSquare`` otherwise."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise NotSquare(f"expected a non-empty square matrix, got shape {arr.shape}")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated quantum state. Construct through :func:`validate_density`."""

    entries: np.ndarray
    tol: float = DEFAULT_TOL

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def diagonal(self) -> np.ndarray:
        return self.entries.diagonal().real

    @property
    def support(self) -> np.ndarray:
        """Boolean mask of indices with ``rho_ii > tol``."""
        return self.diagonal > self.tol

    def purity(self) -> float:
        return float(np.real(np.vdot(self.entries, self.entries)))


@dataclass(frozen=True, eq=False)
class ComparisonMatrix:
    entries: np.ndarray
    support: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def validate_density(m, tol: float = DEFAULT_TOL) -> DensityMatrix:
    """Check that ``m`` is a density matrix at tolerance ``tol``.

    The input is stored unchanged; nothing is symmetrized or renormalized.
    Raises ``NotHermitian``, ``NotUnitTrace`` or ``NotPSD`` with the worst
    offending magnitude in the message.
    """
    arr = as_square_matrix(m)
    if not np.all(np.isfinite(arr)):
        raise NotSquare("matrix has non-finite entries")
    if tol <= 0:
        raise ValueError("tol must be positive")

    herm_err = float(np.max(np.abs(arr - arr.conj().T)))
    if herm_err > tol:
        raise NotHermitian(f"NotHermitian: max |m_ij - conj(m_ji)| = {herm_err:.3e} > tol {tol:.1e}")

    trace = complex(np.trace(arr))
    trace_err = abs(trace - 1.0)
    if trace_err > tol:
        raise NotUnitTrace(f"NotUnitTrace: |Tr m - 1| = {trace_err:.3e} (trace {trace.real:.12g}) > tol {tol:.1e}")

    # eigvalsh reads one triangle; the Hermitian part keeps it symmetric
    lam_min = float(np.linalg.eigvalsh(0.5 * (arr + arr.conj().T))[0])
    if lam_min < -tol:
        raise NotPSD(f"NotPSD: smallest eigenvalue {lam_min:.3e} < -tol {tol:.1e}")

    return DensityMatrix(_frozen(arr), tol)


def l1_coherence(rho: DensityMatrix | np.ndarray) -> float:
    """Sum of the moduli of all off-diagonal entries."""
    m = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    absm = np.abs(m)
    np.fill_diagonal(absm, 0.0)
    return float(absm.sum())


def abs_matrix(rho: DensityMatrix) -> np.ndarray:
    return np.abs(rho.entries)


def dephase(rho: DensityMatrix) -> np.ndarray:
    return np.diag(rho.diagonal)


def inv_sqrt_dephased(rho: DensityMatrix) -> np.ndarray:
    """Diagonal matrix of ``rho_ii^{-1/2}``, with exact zeros where ``rho_ii <= tol``."""
    diag = rho.diagonal
    support = diag > rho.tol
    out = np.zeros(rho.dim)
    out[support] = 1.0 / np.sqrt(diag[support])
    return np.diag(out)


def comparison_matrix(rho: DensityMatrix) -> ComparisonMatrix:
    diag = rho.diagonal
    support = diag > rho.tol
    scale = np.zeros(rho.dim)
    scale[support] = 1.0 / np.sqrt(diag[support])
    a = np.abs(rho.entries) * np.outer(scale, scale)
    # fix the diagonal exactly; off the support it is already zero
    np.fill_diagonal(a, support)
    # symmetrize against rounding in |rho_ij| vs |rho_ji|
    a = 0.5 * (a + a.T)
    return ComparisonMatrix(_frozen(a), _frozen(support))


def qubit_state(r: float, theta: float, phase: float = 0.0) -> DensityMatrix:
    """Bloch-parameterized qubit ``(I + r(sin t cos p X + sin t sin p Y + cos t Z))/2``."""
    off = 0.5 * r * np.sin(theta)
    m = np.array(
        [
            [0.5 * (1 + r * np.cos(theta)), np.exp(-1j * phase) * off],
            [np.exp(1j * phase) * off, 0.5 * (1 - r * np.cos(theta))],
        ]
    )
    return validate_density(m)


def pure_state(amplitudes, tol: float = DEFAULT_TOL) -> DensityMatrix:
    psi = np.asarray(amplitudes, dtype=complex).ravel()
    return validate_density(np.outer(psi, psi.conj()), tol)
