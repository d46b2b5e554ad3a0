import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import dense_lambda_max, random_states
from sioenhance.channel import apply_stochastic, is_strictly_incoherent, kraus_set
from sioenhance.errors import NoConvergence, OutOfRange
from sioenhance.optimizer import (
    analyze,
    block_decompose,
    max_enhanced_coherence,
    max_probability,
    optimal_kraus,
    perron,
    pure_state_analysis,
    qubit_closed_form,
)
from sioenhance.oracle import direct_sum, permute, random_block_state, random_density
from sioenhance.state import comparison_matrix, l1_coherence, pure_state, qubit_state, validate_density

QUBIT = dict(c_in=0.6928203230275509, c_max=0.7559289460184545, p_max=0.6)
RHO_PLUS = validate_density(np.full((2, 2), 0.5))
PURE3 = np.sqrt([0.5, 0.3, 0.2])


def _connected(mask):
    n = len(mask)
    seen, stack = {0}, [0]
    while stack:
        i = stack.pop()
        for j in range(n):
            if mask[i, j] and j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == n


# block decomposition


def test_block_qubit_single_block():
    dec = block_decompose(qubit_state(0.8, math.pi / 3))
    assert len(dec.blocks) == 1 and dec.blocks[0].dim == 2
    assert dec.blocks[0].weight == pytest.approx(1.0)
    assert dec.zero_sector.size == 0


def test_block_incoherent_diagonal():
    dec = block_decompose(validate_density(np.diag([0.3, 0.7])))
    assert [b.dim for b in dec.blocks] == [1, 1]
    assert [b.weight for b in dec.blocks] == [0.3, 0.7]


def test_block_recovers_direct_sum():
    rho = direct_sum([0.5, 0.5], [RHO_PLUS, RHO_PLUS])
    dec = block_decompose(rho)
    assert [list(b.indices) for b in dec.blocks] == [[0, 1], [2, 3]]
    for b in dec.blocks:
        assert b.weight == 0.5
        np.testing.assert_allclose(b.state.entries, RHO_PLUS.entries)


def test_block_ordering_and_zero_sector():
    # blocks {0,3}, {1}, zero sector {2}
    m = np.zeros((4, 4), dtype=complex)
    m[np.ix_([0, 3], [0, 3])] = 0.6 * RHO_PLUS.entries
    m[1, 1] = 0.4
    dec = block_decompose(validate_density(m))
    assert [list(b.indices) for b in dec.blocks] == [[0, 3], [1]]
    assert list(dec.zero_sector) == [2]
    assert list(dec.permutation) == [0, 3, 1, 2]
    np.testing.assert_allclose(dec.block_diagonal()[:2, :2], 0.6 * RHO_PLUS.entries)


@pytest.mark.parametrize("seed", range(40))
def test_block_invariants_random_reducible(seed):
    rng = np.random.default_rng(seed)
    dims = list(rng.integers(1, 4, size=rng.integers(1, 4)))
    rho = random_block_state(dims, int(rng.integers(0, 3)), seed)
    dec = block_decompose(rho)
    covered = np.sort(np.concatenate([b.indices for b in dec.blocks] + [dec.zero_sector]))
    np.testing.assert_array_equal(covered, np.arange(rho.dim))
    assert sum(b.weight for b in dec.blocks) == pytest.approx(1.0, abs=1e-12)
    assert sorted(b.dim for b in dec.blocks) == sorted(dims)
    for b in dec.blocks:
        assert _connected(np.abs(b.state.entries) > 1e-10)
    np.testing.assert_allclose(dec.reassemble(), rho.entries, atol=1e-12)
    assert sorted(dec.permutation) == list(range(rho.dim))


# Perron solver


def test_perron_all_ones_2():
    pd = perron(np.ones((2, 2)))
    assert pd.lambda_max == pytest.approx(2.0, abs=1e-14)
    np.testing.assert_allclose(pd.vector, [1 / math.sqrt(2)] * 2, atol=1e-14)


@pytest.mark.parametrize("d", [1, 3, 6, 10])
def test_perron_all_ones_d(d):
    pd = perron(np.ones((d, d)))
    assert pd.lambda_max == pytest.approx(d, abs=1e-12)
    np.testing.assert_allclose(pd.vector, np.full(d, 1 / math.sqrt(d)), atol=1e-14)


@pytest.mark.parametrize("r, theta", [(0.8, math.pi / 3), (0.3, 2.5), (1.0, 0.4)])
def test_perron_qubit(r, theta):
    pd = perron(comparison_matrix(qubit_state(r, theta)))
    assert pd.lambda_max == pytest.approx(1 + r * abs(math.sin(theta)) / math.sqrt(1 - r**2 * math.cos(theta) ** 2), abs=1e-13)
    np.testing.assert_allclose(pd.vector, [1 / math.sqrt(2)] * 2, atol=1e-14)


@pytest.mark.parametrize("rho", random_states(100, seed=11))
def test_perron_matches_dense_eigensolver(rho):
    a = comparison_matrix(rho).entries
    pd = perron(a)
    assert pd.lambda_max == pytest.approx(dense_lambda_max(a), abs=1e-12)
    assert np.linalg.norm(a @ pd.vector - pd.lambda_max * pd.vector) <= 1e-12 * pd.lambda_max
    assert np.linalg.norm(pd.vector) == pytest.approx(1.0, abs=1e-14)
    assert np.all(pd.vector > 1e-12)


def test_perron_no_convergence():
    a = comparison_matrix(random_density(5, 3, 0)).entries
    with pytest.raises(NoConvergence) as err:
        perron(a, max_iter=2)
    assert err.value.max_iter == 2 and err.value.residual > 0


# Theorem-level quantities


def test_max_coherence_examples():
    assert max_enhanced_coherence(qubit_state(0.8, math.pi / 3)) == pytest.approx(QUBIT["c_max"], abs=1e-13)
    assert max_enhanced_coherence(pure_state(PURE3)) == pytest.approx(2.0, abs=1e-12)
    assert max_enhanced_coherence(validate_density(np.diag([0.2, 0.5, 0.3]))) == 0.0


def test_max_probability_examples():
    assert max_probability(qubit_state(0.8, math.pi / 3)) == pytest.approx(0.6, abs=1e-13)
    assert max_probability(pure_state(PURE3)) == pytest.approx(0.6, abs=1e-12)
    assert max_probability(direct_sum([0.5, 0.5], [RHO_PLUS, RHO_PLUS])) == pytest.approx(1.0, abs=1e-12)


def test_optimal_kraus_qubit():
    r, t = 0.8, math.pi / 3
    k, f = optimal_kraus(qubit_state(r, t))
    expected = math.sqrt(1 - r * abs(math.cos(t))) * np.diag([1 / math.sqrt(1 + r * math.cos(t)), 1 / math.sqrt(1 - r * math.cos(t))])
    np.testing.assert_allclose(k, expected, atol=1e-13)
    np.testing.assert_allclose(f.conj().T @ f + k.conj().T @ k, np.eye(2), atol=1e-13)


def test_optimal_kraus_maximally_coherent():
    k, f = optimal_kraus(RHO_PLUS)
    np.testing.assert_allclose(k, np.eye(2), atol=1e-14)
    np.testing.assert_allclose(f, np.zeros((2, 2)), atol=1e-7)


def test_optimal_kraus_pure3():
    rho = pure_state(PURE3)
    k, _ = optimal_kraus(rho)
    np.testing.assert_allclose(k, math.sqrt(0.2) * np.diag(1 / PURE3), atol=1e-12)
    p, out = apply_stochastic(rho, kraus_set([k]))
    assert p == pytest.approx(0.6, abs=1e-12)
    assert l1_coherence(out) == pytest.approx(2.0, abs=1e-12)
    np.testing.assert_allclose(np.abs(out.entries), np.full((3, 3), 1 / 3), atol=1e-12)


def test_analyze_examples():
    res = analyze(qubit_state(0.8, math.pi / 3))
    assert (res.c_input, res.c_max, res.p_max) == pytest.approx((QUBIT["c_in"], QUBIT["c_max"], 0.6), abs=1e-13)

    res = analyze(validate_density(np.diag([0.3, 0.7])))
    assert (res.c_input, res.c_max, res.p_max) == pytest.approx((0, 0, 1), abs=1e-15)
    np.testing.assert_array_equal(res.optimal_kraus, np.eye(2))

    res = analyze(pure_state(np.ones(3) / math.sqrt(3)))
    assert (res.c_input, res.c_max, res.p_max) == pytest.approx((2, 2, 1), abs=1e-12)


def test_analyze_zero_sector():
    m = np.zeros((3, 3), dtype=complex)
    m[:2, :2] = qubit_state(0.8, math.pi / 3).entries
    res = analyze(validate_density(m))
    assert res.c_max == pytest.approx(QUBIT["c_max"], abs=1e-13)
    assert res.p_max == pytest.approx(0.6, abs=1e-13)
    assert res.optimal_kraus[2, 2] == 0


@pytest.mark.parametrize(
    "amps, expected",
    [
        (np.ones(4) / 2, (3, 1)),
        (PURE3, (2, 0.6)),
        (np.sqrt([0.5, 0.5, 0]), (1, 1)),
    ],
)
def test_pure_state_analysis(amps, expected):
    assert pure_state_analysis(amps) == pytest.approx(expected, abs=1e-12)


def test_pure_state_analysis_crosscheck():
    c, p = pure_state_analysis(PURE3)
    res = analyze(pure_state(PURE3))
    assert (c, p) == pytest.approx((res.c_max, res.p_max), abs=1e-12)


def test_pure_state_analysis_rejects_unnormalized():
    with pytest.raises(OutOfRange):
        pure_state_analysis([1.0, 1.0])


@pytest.mark.parametrize(
    "r, theta, expected",
    [
        (1.0, math.pi / 2, (1.0, 1.0, 1.0)),
        (0.8, math.pi / 3, (QUBIT["c_in"], QUBIT["c_max"], 0.6)),
        (1.0, math.pi / 4, (0.7071067811865475, 1.0, 0.2928932188134524)),
    ],
)
def test_qubit_closed_form(r, theta, expected):
    assert qubit_closed_form(r, theta) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("r, theta", [(0.0, 1.0), (1.2, 1.0), (0.5, 0.0), (0.5, math.pi), (0.5, -1)])
def test_qubit_closed_form_out_of_range(r, theta):
    with pytest.raises(OutOfRange):
        qubit_closed_form(r, theta)


# properties


def _assert_result_invariants(rho, res):
    assert res.c_max >= res.c_input - 1e-9
    assert res.c_max == res.lambda_max - 1
    assert 0 < res.p_max <= 1 + 1e-10
    k = res.optimal_kraus
    assert is_strictly_incoherent(k)
    assert np.linalg.eigvalsh(k.conj().T @ k)[-1] == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("rho", random_states(150, seed=21))
def test_achievability_random(rho):
    res = analyze(rho)
    _assert_result_invariants(rho, res)
    p, out = apply_stochastic(rho, kraus_set([res.optimal_kraus]))
    assert l1_coherence(out) == pytest.approx(res.c_max, abs=1e-8)
    assert p == pytest.approx(res.p_max, abs=1e-8)
    assert res.lambda_max == pytest.approx(dense_lambda_max(comparison_matrix(rho).entries), abs=1e-10)
    assert res.lambda_max <= np.max(comparison_matrix(rho).entries.sum(axis=1)) + 1e-12 <= rho.dim + 1e-9


@pytest.mark.parametrize("seed", range(60))
def test_achievability_reducible(seed):
    rng = np.random.default_rng(seed)
    dims = list(rng.integers(1, 4, size=rng.integers(1, 4)))
    rho = random_block_state(dims, int(rng.integers(0, 3)), 1000 + seed, pure=bool(seed % 3 == 0))
    res = analyze(rho)
    _assert_result_invariants(rho, res)
    p, out = apply_stochastic(rho, kraus_set([res.optimal_kraus]))
    assert l1_coherence(out) == pytest.approx(res.c_max, abs=1e-8)
    assert p == pytest.approx(res.p_max, abs=1e-8)


@pytest.mark.parametrize("rho", random_states(25, seed=31))
def test_permutation_invariance(rho):
    res = analyze(rho)
    rng = np.random.default_rng(rho.dim)
    for _ in range(5):
        res2 = analyze(permute(rho, rng.permutation(rho.dim)))
        assert res2.c_max == pytest.approx(res.c_max, abs=1e-9)
        assert res2.p_max == pytest.approx(res.p_max, abs=1e-9)


@pytest.mark.parametrize("rho", random_states(25, seed=41))
def test_upper_bound_sweep(rho):
    c_max = analyze(rho).c_max
    rng = np.random.default_rng(7)
    for _ in range(200):
        k = np.diag(rng.standard_normal(rho.dim) + 1j * rng.standard_normal(rho.dim))
        k /= np.abs(k).max()
        p, out = apply_stochastic(rho, kraus_set([k]))
        assert l1_coherence(out) <= c_max + 1e-9


@pytest.mark.parametrize("rho", random_states(25, seed=51))
def test_incoherent_unitary_freedom(rho):
    res = analyze(rho)
    rng = np.random.default_rng(99)
    d = rho.dim
    for _ in range(5):
        u = np.eye(d)[:, rng.permutation(d)] @ np.diag(np.exp(2j * np.pi * rng.random(d)))
        p, out = apply_stochastic(rho, kraus_set([u @ res.optimal_kraus]))
        assert p == pytest.approx(res.p_max, abs=1e-9)
        assert l1_coherence(out) == pytest.approx(res.c_max, abs=1e-9)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_mixed_states_stay_below_d(d):
    for i in range(200):
        rho = random_density(d, 2 + i % (d - 1), 77_000 + 1000 * d + i)
        assert rho.purity() < 1 - 1e-6
        assert analyze(rho).lambda_max < d - 1e-9


@settings(max_examples=60, deadline=None)
@given(
    r1=st.floats(0.05, 1.0),
    t1=st.floats(0.05, math.pi - 0.05),
    t2=st.floats(0.05, math.pi - 0.05),
    w=st.floats(0.05, 0.95),
)
def test_degenerate_blocks_sum_probabilities(r1, t1, t2, w):
    _, c, p1 = qubit_closed_form(r1, t1)
    # second qubit with the same enhanced coherence: r^2 = c^2 / (sin^2 + c^2 cos^2)
    r2 = c / math.sqrt(math.sin(t2) ** 2 + (c * math.cos(t2)) ** 2)
    if not 0 < r2 <= 1:
        return
    _, c2, p2 = qubit_closed_form(r2, t2)
    assert c2 == pytest.approx(c, abs=1e-12)
    rho = direct_sum([w, 1 - w], [qubit_state(r1, t1), qubit_state(r2, t2)])
    res = analyze(rho)
    assert res.winning_blocks == (0, 1)
    assert res.c_max == pytest.approx(c, abs=1e-9)
    assert res.p_max == pytest.approx(w * p1 + (1 - w) * p2, abs=1e-9)
