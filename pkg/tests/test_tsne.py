import numpy as np
import pytest

from modallens.errors import ArgumentError
from modallens.tsne import TsneResult, tsne_embed


def _corpus(n=60, d=8, seed=0):
    rng = np.random.default_rng(seed)
    centers = rng.normal(scale=4.0, size=(3, d))
    return np.concatenate([
        centers[k] + rng.normal(scale=0.5, size=(n // 3, d)) for k in range(3)
    ])


def test_seed_determinism_bit_identical():
    X = _corpus()
    a = tsne_embed(X, perplexity=10, iters=120, seed=5)
    b = tsne_embed(X, perplexity=10, iters=120, seed=5)
    np.testing.assert_array_equal(a, b)


def test_different_seeds_differ():
    X = _corpus()
    a = tsne_embed(X, perplexity=10, iters=120, seed=5)
    b = tsne_embed(X, perplexity=10, iters=120, seed=6)
    assert not np.allclose(a, b)


def test_output_shape_and_centering():
    X = _corpus(n=30)
    Y = tsne_embed(X, perplexity=5, iters=100, seed=0)
    assert Y.shape == (30, 2)
    np.testing.assert_allclose(Y.mean(axis=0), [0.0, 0.0], atol=1e-9)


def test_kl_improves_after_exaggeration():
    X = _corpus(n=60)
    result = tsne_embed(X, perplexity=10, iters=500, seed=1,
                        return_diagnostics=True)
    assert isinstance(result, TsneResult)
    assert result.kl_final < result.kl_after_exaggeration
    assert result.kl_final >= 0.0


def test_duplicate_rows_stay_close():
    rng = np.random.default_rng(2)
    centers = rng.normal(scale=4.0, size=(5, 20))
    X = np.concatenate([
        centers[k] + rng.normal(scale=0.5, size=(60, 20)) for k in range(5)
    ])
    X[17] = X[3]  # exact duplicate
    Y = tsne_embed(X, perplexity=30, iters=1000, seed=2)
    diameter = float(np.max(np.linalg.norm(Y[:, None] - Y[None, :], axis=-1)))
    assert np.linalg.norm(Y[17] - Y[3]) <= 1e-3 * diameter


def test_infeasible_perplexity_rejected():
    X = _corpus(n=12)
    with pytest.raises(ArgumentError):
        tsne_embed(X, perplexity=10, iters=10)  # max is (12 - 1) / 3
    with pytest.raises(ArgumentError):
        tsne_embed(X, perplexity=0.5, iters=10)
    with pytest.raises(ArgumentError):
        tsne_embed(X[:1], perplexity=1, iters=10)


def test_nearby_points_embed_nearby():
    # Two tight clusters must be separated, cluster members kept together.
    rng = np.random.default_rng(3)
    X = np.concatenate([
        rng.normal(loc=0.0, scale=0.5, size=(15, 5)),
        rng.normal(loc=10.0, scale=0.5, size=(15, 5)),
    ])
    Y = tsne_embed(X, perplexity=5, iters=1000, seed=0)
    within_a = np.linalg.norm(Y[:15] - Y[:15].mean(axis=0), axis=1).mean()
    within_b = np.linalg.norm(Y[15:] - Y[15:].mean(axis=0), axis=1).mean()
    between = np.linalg.norm(Y[:15].mean(axis=0) - Y[15:].mean(axis=0))
    assert between > max(within_a, within_b)
    dists = np.linalg.norm(Y[:, None] - Y[None, :], axis=-1)
    np.fill_diagonal(dists, np.inf)
    nearest = dists.argmin(axis=1)
    assert all((i < 15) == (j < 15) for i, j in enumerate(nearest))
