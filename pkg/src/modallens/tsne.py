"""Exact t-SNE with per-point bandwidth search, early exaggeration, and
momentum gradient descent.  Deterministic for a fixed seed."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError

EPS = 1e-12


def _pairwise_sq_dists(X: np.ndarray) -> np.ndarray:
    sq = np.sum(X * X, axis=1)
    D = sq[:, None] + sq[None, :] - 2 * X @ X.T
    np.fill_diagonal(D, 0.0)
    return np.maximum(D, 0.0)


def _conditional_probs(D: np.ndarray, perplexity: float, tol: float = 1e-5,
                       max_iter: int = 50) -> np.ndarray:
    """Binary-search each point's Gaussian bandwidth to hit log(perplexity) entropy."""
    n = D.shape[0]
    target = np.log(perplexity)
    P = np.zeros((n, n))
    for i in range(n):
        beta, beta_min, beta_max = 1.0, -np.inf, np.inf
        d = np.delete(D[i], i)
        for _ in range(max_iter):
            p = np.exp(-d * beta)
            s = p.sum()
            if s <= 0:
                h = 0.0
                p = np.zeros_like(p)
            else:
                p = p / s
                h = -np.sum(p * np.log(np.maximum(p, EPS)))
            diff = h - target
            if abs(diff) < tol:
                break
            if diff > 0:
                beta_min = beta
                beta = beta * 2 if beta_max == np.inf else (beta + beta_max) / 2
            else:
                beta_max = beta
                beta = beta / 2 if beta_min == -np.inf else (beta + beta_min) / 2
        P[i, np.arange(n) != i] = p
    return P


def _kl_divergence(P: np.ndarray, Y: np.ndarray) -> float:
    Q = _low_dim_affinities(Y)[0]
    return float(np.sum(P * np.log(np.maximum(P, EPS) / np.maximum(Q, EPS))))


def _low_dim_affinities(Y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    num = 1.0 / (1.0 + _pairwise_sq_dists(Y))
    np.fill_diagonal(num, 0.0)
    return num / np.maximum(num.sum(), EPS), num


@dataclass
class TsneResult:
    coords: np.ndarray
    kl_after_exaggeration: float
    kl_final: float


def tsne_embed(vectors: np.ndarray, perplexity: float = 30.0, iters: int = 1000,
               seed: int = 0, learning_rate: float = 200.0,
               early_exaggeration: float = 12.0, exaggeration_iters: int = 250,
               return_diagnostics: bool = False):
    """Embed N x D vectors into N x 2 coordinates.

    Raises ArgumentError when the perplexity is infeasible for N points
    (requires 1 <= perplexity <= (N - 1) / 3).
    """
    X = np.asarray(vectors, dtype=float)
    n = X.shape[0]
    if n < 2:
        raise ArgumentError("t-SNE needs at least 2 points")
    if not 1 <= perplexity <= (n - 1) / 3:
        raise ArgumentError(
            f"perplexity {perplexity} infeasible for {n} points (max {(n - 1) / 3:.2f})"
        )
    D = _pairwise_sq_dists(X)
    Pc = _conditional_probs(D, perplexity)
    P = (Pc + Pc.T) / (2 * n)
    P = np.maximum(P, EPS)

    rng = np.random.default_rng(seed)
    Y = rng.normal(scale=1e-4, size=(n, 2))
    velocity = np.zeros_like(Y)
    gains = np.ones_like(Y)
    kl_after_exaggeration = np.inf

    exaggeration_iters = min(exaggeration_iters, iters)
    for it in range(iters):
        exaggerating = it < exaggeration_iters
        P_eff = P * early_exaggeration if exaggerating else P
        Q, num = _low_dim_affinities(Y)
        W = (P_eff - Q) * num
        grad = 4 * (np.diag(W.sum(axis=1)) - W) @ Y
        momentum = 0.5 if it < exaggeration_iters else 0.8
        inc = np.sign(grad) != np.sign(velocity)
        gains = np.where(inc, gains + 0.2, gains * 0.8)
        gains = np.maximum(gains, 0.01)
        velocity = momentum * velocity - learning_rate * gains * grad
        Y = Y + velocity
        Y = Y - Y.mean(axis=0)
        if it == exaggeration_iters - 1:
            kl_after_exaggeration = _kl_divergence(P, Y)

    kl_final = _kl_divergence(P, Y)
    if kl_after_exaggeration == np.inf:
        kl_after_exaggeration = kl_final
    if return_diagnostics:
        return TsneResult(coords=Y, kl_after_exaggeration=float(kl_after_exaggeration),
                          kl_final=float(kl_final))
    return Y
