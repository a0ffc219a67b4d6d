"""Shapley core tests against independent permutation/brute-force oracles."""
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modallens.errors import ArgumentError, TooManyUnits
from modallens.shapley import (exact_shapley_values, kernel_shap_values,
                               linear_shap_values, sample_coalitions,
                               shapley_kernel_weight)


def table_value_fn(table: np.ndarray):
    """Set function backed by a value table indexed by coalition bitmask."""

    def value_fn(Z):
        idx = (np.asarray(Z, dtype=int) * (1 << np.arange(Z.shape[1]))).sum(axis=1)
        return table[idx]

    return value_fn


def permutation_shapley(table: np.ndarray, M: int) -> np.ndarray:
    """Independent oracle: average marginal contribution over all orderings."""
    phi = np.zeros(M)
    for perm in itertools.permutations(range(M)):
        mask = 0
        for player in perm:
            before = table[mask]
            mask |= 1 << player
            phi[player] += table[mask] - before
    return phi / math.factorial(M)


def test_kernel_weight_formula():
    for M in (2, 5, 9):
        for s in range(1, M):
            expect = (M - 1) / (math.comb(M, s) * s * (M - s))
            assert shapley_kernel_weight(M, s) == pytest.approx(expect)


def test_kernel_weight_rejects_degenerate_sizes():
    for s in (0, 5):
        with pytest.raises(ArgumentError):
            shapley_kernel_weight(5, s)


def test_exact_matches_permutation_oracle():
    rng = np.random.default_rng(3)
    for M in (2, 3, 4, 5, 6):
        table = rng.normal(size=2**M)
        phi, base = exact_shapley_values(table_value_fn(table), M)
        np.testing.assert_allclose(phi, permutation_shapley(table, M), atol=1e-10)
        assert base == pytest.approx(table[0])


def test_exact_local_accuracy():
    rng = np.random.default_rng(4)
    M = 7
    table = rng.normal(size=2**M)
    phi, base = exact_shapley_values(table_value_fn(table), M)
    assert phi.sum() == pytest.approx(table[-1] - table[0], abs=1e-10)


def test_exact_dummy_player():
    rng = np.random.default_rng(5)
    M = 5
    # Player 0 never changes the value: v(S) = v(S minus player 0).
    base = rng.normal(size=2**M)
    table = np.array([base[mask & ~1] for mask in range(2**M)])
    phi, _ = exact_shapley_values(table_value_fn(table), M)
    assert abs(phi[0]) < 1e-12


def test_exact_symmetry():
    rng = np.random.default_rng(6)
    M = 5

    def swap01(mask):
        b0, b1 = mask & 1, (mask >> 1) & 1
        return (mask & ~3) | (b0 << 1) | b1

    raw = rng.normal(size=2**M)
    table = np.array([(raw[m] + raw[swap01(m)]) / 2 for m in range(2**M)])
    phi, _ = exact_shapley_values(table_value_fn(table), M)
    assert phi[0] == pytest.approx(phi[1], abs=1e-12)


def test_exact_linearity():
    rng = np.random.default_rng(7)
    M = 4
    u, v = rng.normal(size=2**M), rng.normal(size=2**M)
    pu, _ = exact_shapley_values(table_value_fn(u), M)
    pv, _ = exact_shapley_values(table_value_fn(v), M)
    puv, _ = exact_shapley_values(table_value_fn(u + v), M)
    np.testing.assert_allclose(puv, pu + pv, atol=1e-12)


def test_exact_bounds():
    with pytest.raises(TooManyUnits):
        exact_shapley_values(lambda Z: np.zeros(len(Z)), 21)
    with pytest.raises(ArgumentError):
        exact_shapley_values(lambda Z: np.zeros(len(Z)), 0)


def test_sample_coalitions_exhaustive_budget():
    M = 5
    rng = np.random.default_rng(0)
    Z = sample_coalitions(M, 2**M - 2, rng)
    sizes = Z.sum(axis=1)
    assert len(Z) == 2**M - 2
    assert sizes.min() >= 1 and sizes.max() <= M - 1
    masks = {tuple(row.tolist()) for row in Z}
    assert len(masks) == 2**M - 2


def test_sample_coalitions_deterministic():
    a = sample_coalitions(8, 40, np.random.default_rng(11))
    b = sample_coalitions(8, 40, np.random.default_rng(11))
    np.testing.assert_array_equal(a, b)


def test_sample_coalitions_prefers_extreme_sizes():
    Z = sample_coalitions(10, 20, np.random.default_rng(0))
    # The 20 coalitions of size 1 and 9 have the highest kernel weight.
    assert set(Z.sum(axis=1).tolist()) == {1, 9}


def test_kernel_exhaustive_matches_exact():
    rng = np.random.default_rng(8)
    for M in (3, 5, 8):
        table = rng.normal(size=2**M)
        fn = table_value_fn(table)
        phi_e, base_e = exact_shapley_values(fn, M)
        phi_k, base_k = kernel_shap_values(fn, M, n_samples=2**M - 2, seed=1)
        np.testing.assert_allclose(phi_k, phi_e, atol=1e-6)
        assert base_k == pytest.approx(base_e)


def test_kernel_sampled_preserves_local_accuracy():
    rng = np.random.default_rng(9)
    M = 10
    table = rng.normal(size=2**M)
    fn = table_value_fn(table)
    phi, base = kernel_shap_values(fn, M, n_samples=200, seed=2)
    assert phi.sum() == pytest.approx(table[-1] - table[0], abs=1e-8)


def test_kernel_argument_validation():
    fn = table_value_fn(np.zeros(4))
    with pytest.raises(ArgumentError):
        kernel_shap_values(fn, 1, n_samples=10, seed=0)
    with pytest.raises(ArgumentError):
        kernel_shap_values(table_value_fn(np.zeros(32)), 5, n_samples=3, seed=0)


def test_linear_shap_closed_form():
    rng = np.random.default_rng(10)
    M = 6
    w, x, mu = rng.normal(size=M), rng.normal(size=M), rng.normal(size=M)
    phi, base = linear_shap_values(w, 0.7, x, mu)
    np.testing.assert_allclose(phi, w * (x - mu))
    assert base == pytest.approx(float(w @ mu) + 0.7)

    def fn(Z):
        masked = np.where(Z, x, mu)
        return masked @ w + 0.7

    phi_e, base_e = exact_shapley_values(fn, M)
    np.testing.assert_allclose(phi, phi_e, atol=1e-12)
    assert base == pytest.approx(base_e)


def test_linear_shap_shape_mismatch():
    from modallens.errors import ShapeError

    with pytest.raises(ShapeError):
        linear_shap_values(np.ones(3), 0.0, np.ones(2), np.ones(3))


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=2, max_value=6), st.integers(min_value=0, max_value=2**31 - 1))
def test_exact_efficiency_property(M, seed):
    table = np.random.default_rng(seed).normal(size=2**M)
    phi, base = exact_shapley_values(table_value_fn(table), M)
    assert abs(phi.sum() - (table[-1] - table[0])) < 1e-9
    assert base == pytest.approx(table[0])
