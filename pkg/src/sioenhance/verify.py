"""Seeded property campaigns run by ``sioenhance verify``.

Every random state is drawn from its own integer seed; a failing campaign
reports ``(d, rank, seed)`` so the state can be rebuilt with
``random_density(d, rank, seed)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import complete_instrument, kraus_set
from .optimizer import analyze
from .oracle import (
    all_ones_propagation_check,
    brute_force_max_coherence,
    monte_carlo_success,
    random_density,
)
from .state import comparison_matrix

EXACT_TOL = 1e-9


@dataclass
class CampaignResult:
    name: str
    passed: bool
    checked: int
    worst_margin: float
    detail: str = ""
    failures: list = field(default_factory=list)


def state_seed(seed: int, campaign: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, campaign, index]).generate_state(1, np.uint64)[0] >> 1)


def _spec(i: int, dims):
    d = dims[i % len(dims)]
    return d, 1 + (i // len(dims)) % d


def oracle_soundness(seed: int, samples: int, n_states: int = 200, dims=(2, 3, 4, 5)) -> CampaignResult:
    """Brute force never beats the optimizer and reaches it through its Perron candidate."""
    worst_excess, worst_gap, failures = -np.inf, 0.0, []
    for i in range(n_states):
        d, rank = _spec(i, dims)
        s = state_seed(seed, 1, i)
        rho = random_density(d, rank, s)
        c_max = analyze(rho).c_max
        rep = brute_force_max_coherence(rho, samples, s)
        excess = rep.best_coherence - c_max
        worst_excess = max(worst_excess, excess)
        worst_gap = max(worst_gap, abs(excess))
        if abs(excess) > EXACT_TOL:
            failures.append((d, rank, s))
    return CampaignResult(
        "oracle_soundness", not failures, n_states, float(worst_excess),
        f"max(best - cMax) = {worst_excess:.3e}, max |best - cMax| = {worst_gap:.3e}", failures,
    )


def monte_carlo_consistency(seed: int, trials: int, n_states: int = 50, dims=(2, 3, 4, 5)) -> CampaignResult:
    """Empirical success rate of the optimal operator lies within 4 standard errors of pMax."""
    worst, failures = -np.inf, []
    for i in range(n_states):
        d, rank = _spec(i, dims)
        s = state_seed(seed, 2, i)
        rho = random_density(d, rank, s)
        res = analyze(rho)
        inst = complete_instrument(kraus_set([res.optimal_kraus]))
        rep = monte_carlo_success(rho, inst, trials, s)
        dev = abs(rep.empirical_p - res.p_max)
        bound = 4 * rep.std_error
        worst = max(worst, dev - bound)
        if dev > bound:
            failures.append((d, rank, s))
    return CampaignResult(
        "monte_carlo_consistency", not failures, n_states, float(worst),
        f"max(|empiricalP - pMax| - 4 stdError) = {worst:.3e}", failures,
    )


def appendix_property(seed: int, n_per_dim: int = 10_000, dims=(2, 3, 4, 5, 6)) -> CampaignResult:
    """A comparison-matrix row of ones forces the all-ones matrix."""
    failures, triggered, total = [], 0, 0
    for d in dims:
        for i in range(n_per_dim):
            rank = 1 + i % d
            s = state_seed(seed, 3, d * n_per_dim + i)
            a = comparison_matrix(random_density(d, rank, s))
            if np.any((np.abs(a.entries - 1.0) <= 1e-10).all(axis=1)):
                triggered += 1
            if not all_ones_propagation_check(a):
                failures.append((d, rank, s))
            total += 1
    return CampaignResult(
        "appendix_all_ones", not failures, total, float(len(failures)),
        f"{triggered} states had an all-ones row", failures,
    )


def pure_mixed_dichotomy(seed: int, n_per_dim: int = 200, dims=(2, 3, 4, 5, 6)) -> CampaignResult:
    """Full-support pure states reach lambda = d; mixed states stay strictly below."""
    worst_pure, worst_mixed, failures = 0.0, -np.inf, []
    for d in dims:
        for i in range(n_per_dim):
            pure = i % 2 == 0
            rank = 1 if pure else 2 + (i // 2) % (d - 1)
            s = state_seed(seed, 4, d * n_per_dim + i)
            lam = analyze(random_density(d, rank, s)).lambda_max
            if pure:
                worst_pure = max(worst_pure, abs(lam - d))
                ok = abs(lam - d) <= EXACT_TOL
            else:
                worst_mixed = max(worst_mixed, lam - d)
                ok = lam < d - EXACT_TOL
            if not ok:
                failures.append((d, rank, s))
    return CampaignResult(
        "pure_mixed_dichotomy", not failures, len(dims) * n_per_dim, float(max(worst_pure, worst_mixed)),
        f"pure max |lambda - d| = {worst_pure:.3e}, mixed max (lambda - d) = {worst_mixed:.3e}", failures,
    )


def run_all(seed: int, samples: int, trials: int, n_states: int | None = None) -> list[CampaignResult]:
    """All four campaigns; ``n_states`` overrides every campaign size (for quick runs)."""
    if n_states is None:
        return [
            oracle_soundness(seed, samples),
            monte_carlo_consistency(seed, trials),
            appendix_property(seed),
            pure_mixed_dichotomy(seed),
        ]
    return [
        oracle_soundness(seed, samples, n_states),
        monte_carlo_consistency(seed, trials, n_states),
        appendix_property(seed, n_states),
        pure_mixed_dichotomy(seed, n_states),
    ]
