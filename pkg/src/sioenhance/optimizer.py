"""Optimal coherence enhancement by a single strictly incoherent Kraus operator.

Pipeline: split the state into irreducible blocks (connected components of
the support graph of the comparison matrix), find the Perron pair of each
block, keep the blocks whose Perron root equals the global maximum, and
build the saturated diagonal Kraus operator on those blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import KrausSet, kraus_set
from .errors import NoConvergence, OutOfRange
from .state import (
    DEFAULT_TOL,
    ComparisonMatrix,
    DensityMatrix,
    comparison_matrix,
    l1_coherence,
    pure_state,
)

PERRON_TOL = 1e-12
PERRON_MAX_ITER = 100_000
# blocks whose Perron root is within this of the maximum count as winners
WINNER_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Block:
    indices: np.ndarray
    weight: float
    state: DensityMatrix

    @property
    def dim(self) -> int:
        return len(self.indices)


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    """``rho = P (p_1 rho_1 + ... + p_n rho_n + 0) P^T`` for a permutation ``P``.

    ``permutation[k]`` is the original index placed at position ``k`` of the
    block-diagonal form.
    """

    permutation: np.ndarray
    blocks: tuple
    zero_sector: np.ndarray
    dim: int

    def reassemble(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for b in self.blocks:
            out[np.ix_(b.indices, b.indices)] = b.weight * b.state.entries
        return out

    def block_diagonal(self) -> np.ndarray:
        """The direct sum in permuted coordinates."""
        p = self.permutation
        return self.reassemble()[np.ix_(p, p)]


@dataclass(frozen=True, eq=False)
class PerronData:
    lambda_max: float
    vector: np.ndarray
    iterations: int
    residual: float


@dataclass(frozen=True, eq=False)
class BlockReport:
    indices: np.ndarray
    weight: float
    lambda_max: float
    phi: np.ndarray
    p_max: float
    argmin: int  # original index attaining min rho_ii / phi_i^2
    winning: bool
    iterations: int


@dataclass(frozen=True, eq=False)
class EnhancementResult:
    c_input: float
    c_max: float
    p_max: float
    lambda_max: float
    blocks: tuple
    winning_blocks: tuple
    optimal_kraus: np.ndarray
    failure_kraus: np.ndarray
    decomposition: BlockDecomposition

    def kraus_set(self) -> KrausSet:
        return kraus_set([self.optimal_kraus])


def block_decompose(rho: DensityMatrix, a: ComparisonMatrix | None = None) -> BlockDecomposition:
    """Irreducible blocks of ``rho``, ordered by their smallest original index.

    Two supported indices are joined when their comparison-matrix entry
    exceeds ``rho.tol``. Indices with ``rho_ii <= tol`` form the zero sector.
    """
    if a is None:
        a = comparison_matrix(rho)
    support = np.flatnonzero(a.support)
    zero_sector = np.flatnonzero(~a.support)
    blocks = []
    if support.size:
        adj = a.entries > rho.tol
        for idx in _components(adj, support):
            sub = rho.entries if len(idx) == rho.dim else rho.entries[np.ix_(idx, idx)]
            weight = float(np.trace(sub).real)
            # a renormalized principal submatrix of a valid state is valid
            blocks.append(Block(idx, weight, DensityMatrix(_readonly(sub / weight), rho.tol)))
    perm = np.concatenate([b.indices for b in blocks] + [zero_sector]).astype(int)
    return BlockDecomposition(perm, tuple(blocks), zero_sector, rho.dim)


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _components(adj: np.ndarray, nodes: np.ndarray) -> list[np.ndarray]:
    """Connected components among ``nodes``, each sorted, listed by smallest member."""
    rows = adj.tolist()
    unseen = set(nodes.tolist())
    comps = []
    for start in nodes.tolist():
        if start not in unseen:
            continue
        unseen.discard(start)
        comp, frontier = [start], [start]
        while frontier:
            row = rows[frontier.pop()]
            for j in list(unseen):
                if row[j]:
                    unseen.discard(j)
                    comp.append(j)
                    frontier.append(j)
        comps.append(np.array(sorted(comp)))
    return comps


def perron(a, conv_tol: float = PERRON_TOL, max_iter: int = PERRON_MAX_ITER) -> PerronData:
    """Perron root and unit nonnegative Perron vector by power iteration.

    Starts from the uniform vector and stops once
    ``||A x - lambda x|| <= conv_tol * lambda`` with ``lambda = x^T A x``.
    """
    a = np.asarray(a.entries if isinstance(a, ComparisonMatrix) else a, dtype=float)
    n = a.shape[0]
    x = np.full(n, 1.0 / math.sqrt(n))
    residual = math.inf
    for it in range(1, max_iter + 1):
        y = a @ x
        lam = float(x @ y)
        residual = float(np.linalg.norm(y - lam * x))
        if lam > 0 and residual <= conv_tol * lam:
            return PerronData(lam, x, it, residual / lam)
        norm = float(np.linalg.norm(y))
        if norm == 0.0:
            # A x = 0 with x > 0 forces A = 0
            return PerronData(0.0, x, it, 0.0)
        x = y / norm
    raise NoConvergence(max_iter, residual / lam if lam > 0 else residual)


def _block_reports(rho: DensityMatrix, a: ComparisonMatrix, dec: BlockDecomposition):
    perrons = []
    for b in dec.blocks:
        if b.dim == 1:
            perrons.append(PerronData(1.0, np.ones(1), 0, 0.0))
        else:
            sub = a.entries if b.dim == dec.dim else a.entries[np.ix_(b.indices, b.indices)]
            perrons.append(perron(sub))
    lam_max = max(p.lambda_max for p in perrons)
    reports = []
    for b, pd in zip(dec.blocks, perrons):
        ratios = b.state.diagonal / pd.vector**2
        k = int(np.argmin(ratios))
        reports.append(
            BlockReport(
                indices=b.indices,
                weight=b.weight,
                lambda_max=pd.lambda_max,
                phi=pd.vector,
                p_max=float(ratios[k]),
                argmin=int(b.indices[k]),
                winning=pd.lambda_max >= lam_max - WINNER_TOL,
                iterations=pd.iterations,
            )
        )
    return lam_max, reports


def _optimal_diagonal(dec: BlockDecomposition, reports) -> np.ndarray:
    diag = np.zeros(dec.dim)
    for b, rep in zip(dec.blocks, reports):
        if not rep.winning:
            continue
        amps = rep.phi / np.sqrt(b.state.diagonal)
        diag[b.indices] = amps / amps.max()  # k_alpha = min sqrt(rho_ii)/phi_i
    return diag


def analyze(rho: DensityMatrix) -> EnhancementResult:
    a = comparison_matrix(rho)
    dec = block_decompose(rho, a)
    lam_max, reports = _block_reports(rho, a, dec)
    winners = tuple(i for i, r in enumerate(reports) if r.winning)
    p_max = math.fsum(reports[i].weight * reports[i].p_max for i in winners)
    diag = _optimal_diagonal(dec, reports)
    k_opt = _readonly(np.diag(diag.astype(complex)))
    f = _readonly(np.diag(np.sqrt(np.maximum(1.0 - diag**2, 0.0)).astype(complex)))
    return EnhancementResult(
        c_input=l1_coherence(rho),
        c_max=lam_max - 1.0,
        p_max=p_max,
        lambda_max=lam_max,
        blocks=tuple(reports),
        winning_blocks=winners,
        optimal_kraus=k_opt,
        failure_kraus=f,
        decomposition=dec,
    )


def max_enhanced_coherence(rho: DensityMatrix) -> float:
    return analyze(rho).c_max


def max_probability(rho: DensityMatrix) -> float:
    return analyze(rho).p_max


def optimal_kraus(rho: DensityMatrix) -> tuple[np.ndarray, np.ndarray]:
    """The saturated optimal Kraus operator and its failure completion."""
    res = analyze(rho)
    return res.optimal_kraus, res.failure_kraus


def pure_state_analysis(amplitudes, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """``(c_max, p_max)`` for a pure state from its amplitudes.

    With full support the optimum is the maximally coherent state, reached
    with probability ``d * min |psi_i|^2``.
    """
    psi = np.asarray(amplitudes, dtype=complex).ravel()
    if abs(np.linalg.norm(psi) - 1.0) > tol:
        raise OutOfRange(f"amplitudes have norm {np.linalg.norm(psi):.12g}, expected 1")
    weights = np.abs(psi) ** 2
    nonzero = int(np.count_nonzero(weights > tol))
    if nonzero == psi.size:
        return float(nonzero - 1), float(psi.size * weights.min())
    return float(nonzero - 1), analyze(pure_state(psi, tol)).p_max


def qubit_closed_form(r: float, theta: float) -> tuple[float, float, float]:
    """``(C_l1(rho), max C_l1, P_max)`` for the Bloch qubit with radius ``r`` and polar angle ``theta``."""
    if not (0 < r <= 1):
        raise OutOfRange(f"r = {r} outside (0, 1]")
    if not (0 < theta < math.pi):
        raise OutOfRange(f"theta = {theta} outside (0, pi)")
    s, c = abs(math.sin(theta)), abs(math.cos(theta))
    return r * s, r * s / math.sqrt(1 - (r * c) ** 2), 1 - r * c
