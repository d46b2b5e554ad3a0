"""Strictly incoherent Kraus operators and their (stochastic) application."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotSubnormalized, ZeroProbability
from .state import DEFAULT_TOL, DensityMatrix, as_square_matrix, validate_density


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Ordered Kraus operators with ``sum K^dag K <= I``."""

    operators: tuple
    tol: float = DEFAULT_TOL

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def __len__(self):
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)

    def gram(self) -> np.ndarray:
        """``sum_n K_n^dag K_n``."""
        return sum(k.conj().T @ k for k in self.operators)


@dataclass(frozen=True)
class SelectiveOutcome:
    index: int
    probability: float
    state: DensityMatrix


def kraus_set(operators, tol: float = DEFAULT_TOL) -> KrausSet:
    """Build a :class:`KrausSet`, checking shapes and subnormalization."""
    ops = []
    for k in operators:
        k = np.array(as_square_matrix(k), copy=True)
        k.setflags(write=False)
        ops.append(k)
    if not ops:
        raise DimensionMismatch("a Kraus set needs at least one operator")
    d = ops[0].shape[0]
    if any(k.shape != (d, d) for k in ops):
        raise DimensionMismatch("Kraus operators have mixed shapes")
    ks = KrausSet(tuple(ops), tol)
    top = float(np.linalg.eigvalsh(ks.gram())[-1])
    if top > 1 + tol:
        raise NotSubnormalized(f"largest eigenvalue of sum K^dag K is {top:.12g} > 1")
    return ks


def is_strictly_incoherent(k, tol: float = DEFAULT_TOL) -> bool:
    """At most one entry of modulus above ``tol`` in every row and every column."""
    nz = np.abs(np.asarray(k)) > tol
    return bool(np.all(nz.sum(axis=0) <= 1) and np.all(nz.sum(axis=1) <= 1))


def _check_dims(rho: DensityMatrix, ks: KrausSet):
    if ks.dim != rho.dim:
        raise DimensionMismatch(f"state has dim {rho.dim}, Kraus set has dim {ks.dim}")


def _conjugate(k: np.ndarray, m: np.ndarray) -> np.ndarray:
    out = k @ m @ k.conj().T
    return 0.5 * (out + out.conj().T)


def apply_selective(rho: DensityMatrix, ks: KrausSet) -> list[SelectiveOutcome]:
    """Post-measurement branches ``(p_n, K_n rho K_n^dag / p_n)``.

    Branches with ``p_n <= tol`` are dropped.
    """
    _check_dims(rho, ks)
    outcomes = []
    for n, k in enumerate(ks):
        out = _conjugate(k, rho.entries)
        p = float(np.trace(out).real)
        if p <= ks.tol:
            continue
        outcomes.append(SelectiveOutcome(n, p, validate_density(out / p, rho.tol)))
    return outcomes


def apply_channel(rho: DensityMatrix, ks: KrausSet) -> np.ndarray:
    """Unnormalized ``sum_n K_n rho K_n^dag``."""
    _check_dims(rho, ks)
    return sum(_conjugate(k, rho.entries) for k in ks)


def apply_stochastic(rho: DensityMatrix, ks: KrausSet) -> tuple[float, DensityMatrix]:
    """Success probability and renormalized output of the sub-channel ``ks``."""
    out = apply_channel(rho, ks)
    p = float(np.trace(out).real)
    if p <= ks.tol:
        raise ZeroProbability(f"success probability {p:.3e} <= tol {ks.tol:.1e}")
    return p, validate_density(out / p, rho.tol)


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    """Principal square root of a Hermitian PSD matrix; tiny negative eigenvalues clip to 0."""
    m = 0.5 * (m + m.conj().T)
    if np.count_nonzero(m - np.diag(np.diag(m))) == 0:
        return np.diag(np.sqrt(np.clip(np.diag(m).real, 0.0, None))).astype(complex)
    w, v = np.linalg.eigh(m)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def failure_operator(ks: KrausSet) -> np.ndarray:
    d = ks.dim
    return psd_sqrt(np.eye(d) - ks.gram())


def complete_instrument(ks: KrausSet) -> KrausSet:
    """Append ``F = (I - sum K^dag K)^{1/2}`` so that the set becomes trace preserving."""
    return kraus_set(list(ks.operators) + [failure_operator(ks)], ks.tol)


def is_complete(ks: KrausSet, tol: float | None = None) -> bool:
    tol = ks.tol if tol is None else tol
    return bool(np.max(np.abs(ks.gram() - np.eye(ks.dim))) <= tol)
