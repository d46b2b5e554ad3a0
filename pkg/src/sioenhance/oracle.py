"""Independent checks of the optimizer.

The brute-force search and the Monte Carlo sampler never call the power
iteration: the search evaluates the coherence of ``K rho K^dag / Tr`` for
diagonal ``K`` straight from the matrix entries, and its deterministic
candidate comes from a dense ``eigh`` of the comparison matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import KrausSet, is_complete, kraus_set
from .errors import DimensionMismatch, IncompleteInstrument
from .state import DensityMatrix, comparison_matrix, validate_density

BATCH = 100_000


@dataclass(frozen=True, eq=False)
class SearchReport:
    best_coherence: float
    best_diagonal: np.ndarray
    samples: int
    seed: int


@dataclass(frozen=True)
class TrialReport:
    trials: int
    successes: int
    seed: int

    @property
    def empirical_p(self) -> float:
        return self.successes / self.trials

    @property
    def std_error(self) -> float:
        p = self.empirical_p
        return float(np.sqrt(p * (1 - p) / self.trials))


def _rng(seed: int, *stream: int) -> np.random.Generator:
    return np.random.default_rng([seed, *stream]) if stream else np.random.default_rng(seed)


def random_density(d: int, rank: int, seed: int) -> DensityMatrix:
    """``G G^dag / Tr`` with ``G`` a d x rank complex Ginibre matrix."""
    if not 1 <= rank <= d:
        raise ValueError(f"rank must lie in [1, {d}], got {rank}")
    rng = _rng(seed)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    return validate_density(m / np.trace(m).real)


def random_permutation(d: int, seed: int) -> np.ndarray:
    return _rng(seed).permutation(d)


def permute(rho: DensityMatrix, perm) -> DensityMatrix:
    """``M rho M^T`` for the permutation matrix sending index ``perm[k]`` to ``k``."""
    perm = np.asarray(perm)
    return validate_density(rho.entries[np.ix_(perm, perm)], rho.tol)


def direct_sum(weights, states, zeros: int = 0) -> DensityMatrix:
    """``p_1 rho_1 + ... + p_n rho_n + 0_zeros`` as one block-diagonal state."""
    dims = [s.dim for s in states]
    d = sum(dims) + zeros
    out = np.zeros((d, d), dtype=complex)
    at = 0
    for w, s in zip(weights, states):
        out[at:at + s.dim, at:at + s.dim] = w * s.entries
        at += s.dim
    return validate_density(out)


def random_block_state(dims, zeros: int, seed: int, pure: bool = False) -> DensityMatrix:
    """Random reducible state: a permuted direct sum of random blocks plus a zero sector."""
    rng = _rng(seed)
    weights = rng.dirichlet(np.ones(len(dims)))
    states = []
    for dk in dims:
        rank = 1 if pure else int(rng.integers(1, dk + 1))
        states.append(random_density(dk, rank, int(rng.integers(2**62))))
    rho = direct_sum(weights, states, zeros)
    return permute(rho, rng.permutation(rho.dim))


def random_strictly_incoherent_instrument(d: int, n_ops: int, seed: int, tol: float = 1e-10) -> KrausSet:
    """Complete instrument of ``n_ops`` (partial permutation) x (complex diagonal) operators."""
    rng = _rng(seed)
    ops = []
    for _ in range(n_ops):
        diag = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        diag[rng.random(d) < 0.25] = 0.0
        ops.append(np.eye(d)[:, rng.permutation(d)] @ np.diag(diag))
    # each K^dag K is diagonal, so the normalizer keeps strict incoherence
    norm = sum((np.abs(k) ** 2).sum(axis=0) for k in ops)
    norm[norm == 0] = 1.0
    ops = [k / np.sqrt(norm) for k in ops]
    missing = np.flatnonzero(sum((np.abs(k) ** 2).sum(axis=0) for k in ops) < 0.5)
    if missing.size:
        ops.append(np.diag(np.isin(np.arange(d), missing).astype(float)))
    return kraus_set(ops, tol)


def diagonal_kraus_coherence(rho: DensityMatrix, moduli: np.ndarray) -> np.ndarray:
    """l1-coherence of ``K rho K^dag / Tr`` for diagonal ``K`` with the given moduli.

    ``moduli`` has shape (..., d); rows for which ``K rho K^dag = 0`` give NaN.
    """
    off = np.abs(rho.entries)
    np.fill_diagonal(off, 0.0)
    moduli = np.asarray(moduli, dtype=float)
    total = np.einsum("...i,ij,...j->...", moduli, off, moduli)
    norm = np.einsum("...i,i->...", moduli**2, rho.diagonal)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = total / norm
    return np.where(norm > rho.tol, out, np.nan)


def perron_candidate(rho: DensityMatrix) -> np.ndarray:
    """Diagonal ``phi_i / sqrt(rho_ii)`` from a dense eigensolve of the comparison matrix."""
    a = comparison_matrix(rho)
    _, vecs = np.linalg.eigh(a.entries)
    phi = np.abs(vecs[:, -1])
    out = np.zeros(rho.dim)
    out[a.support] = phi[a.support] / np.sqrt(rho.diagonal[a.support])
    return out


def brute_force_max_coherence(rho: DensityMatrix, samples: int, seed: int) -> SearchReport:
    """Best coherence over random diagonal Kraus operators.

    Squared moduli are drawn uniformly from the simplex; the uniform vector
    and the Perron candidate are always evaluated too.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    d = rho.dim
    best_c, best_v = -np.inf, None
    fixed = np.stack([np.full(d, 1.0 / np.sqrt(d)), perron_candidate(rho)])
    batches = [fixed]
    for b, start in enumerate(range(0, samples, BATCH)):
        n = min(BATCH, samples - start)
        batches.append(np.sqrt(_rng(seed, b).dirichlet(np.ones(d), size=n)))
    for moduli in batches:
        c = diagonal_kraus_coherence(rho, moduli)
        if np.all(np.isnan(c)):
            continue
        k = int(np.nanargmax(c))
        if c[k] > best_c:
            best_c, best_v = float(c[k]), moduli[k]
    return SearchReport(best_c, best_v, samples, seed)


def monte_carlo_success(
    rho: DensityMatrix,
    instrument: KrausSet,
    trials: int,
    seed: int,
    n_success: int | None = None,
) -> TrialReport:
    """Sample instrument outcomes and count draws among the first ``n_success`` operators.

    By default every operator but the last (the completion) counts as success.
    Trials run in batches, each with its own ``(seed, batch)`` stream.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if instrument.dim != rho.dim:
        raise DimensionMismatch(f"state has dim {rho.dim}, instrument has dim {instrument.dim}")
    if not is_complete(instrument):
        raise IncompleteInstrument("sum K^dag K deviates from the identity by more than tol")
    if n_success is None:
        n_success = len(instrument) - 1
    probs = np.array([np.real(np.trace(k @ rho.entries @ k.conj().T)) for k in instrument])
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum()
    successes = 0
    for b, start in enumerate(range(0, trials, BATCH)):
        n = min(BATCH, trials - start)
        draws = _rng(seed, b).choice(len(probs), size=n, p=probs)
        successes += int(np.count_nonzero(draws < n_success))
    return TrialReport(trials, successes, seed)


def all_ones_propagation_check(a, tol: float = 1e-10) -> bool:
    """A row of ones in the comparison matrix forces every entry to be one."""
    m = np.asarray(a.entries if hasattr(a, "entries") else a)
    ones = np.abs(m - 1.0) <= tol
    if not np.any(ones.all(axis=1)):
        return True
    return bool(ones.all())
