"""Shapley attribution core: exact enumeration, kernel weights, and the
weighted-least-squares kernel approximation.

Everything here works on an abstract set function ``value_fn(Z) -> outputs``
where ``Z`` is an (n, M) boolean coalition matrix; the mapping from coalitions
to masked model inputs lives in :mod:`modallens.attribution`.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import ArgumentError, SingularSystem, TooManyUnits

EXACT_ENUMERATION_BOUND = 20


def shapley_kernel_weight(M: int, s: int) -> float:
    """Kernel weight (M-1) / (C(M,s) * s * (M-s)) for a proper coalition of size s."""
    if not 0 < s < M:
        raise ArgumentError(
            f"kernel weight undefined for s={s} with M={M}; "
            "empty/full coalitions are equality constraints"
        )
    return (M - 1) / (math.comb(M, s) * s * (M - s))


def _all_coalitions(M: int) -> np.ndarray:
    """All 2^M coalitions as a boolean matrix; row index is the bitmask."""
    masks = np.arange(2**M, dtype=np.uint32)
    return (masks[:, None] >> np.arange(M)) & 1 == 1


def exact_shapley_values(value_fn, M: int) -> tuple[np.ndarray, float]:
    """Exact Shapley values by full coalition enumeration.

    Returns (phi, base) with base = value of the empty coalition.  Each of the
    2^M coalitions is evaluated exactly once through ``value_fn``.
    """
    if M > EXACT_ENUMERATION_BOUND:
        raise TooManyUnits(f"M={M} exceeds enumeration bound {EXACT_ENUMERATION_BOUND}")
    if M < 1:
        raise ArgumentError("need at least one unit")
    Z = _all_coalitions(M)
    values = np.asarray(value_fn(Z), dtype=float)
    sizes = Z.sum(axis=1)
    # weight for adding player i to a coalition of size s: s!(M-s-1)!/M!
    add_w = np.array([math.factorial(s) * math.factorial(M - s - 1) / math.factorial(M)
                      for s in range(M)])
    phi = np.zeros(M)
    masks = np.arange(2**M, dtype=np.uint32)
    for i in range(M):
        bit = np.uint32(1 << i)
        without = (masks & bit) == 0
        s_without = sizes[without]
        phi[i] = np.sum(add_w[s_without] * (values[masks[without] | bit] - values[without]))
    return phi, float(values[0])


def sample_coalitions(M: int, n_samples: int, rng: np.random.Generator) -> np.ndarray:
    """Deterministic stratified coalition sampling for Kernel SHAP.

    Sizes are visited in descending kernel weight (s=1 and M-1 first, pairing
    complementary sizes); complete strata are enumerated, the first partial
    stratum is sampled without replacement.  With n_samples >= 2^M - 2 every
    proper coalition appears exactly once.
    """
    order: list[int] = []
    for s in range(1, M // 2 + 1):
        order.append(s)
        if M - s != s:
            order.append(M - s)
    rows: list[np.ndarray] = []
    budget = n_samples
    for s in order:
        if budget <= 0:
            break
        stratum = math.comb(M, s)
        if stratum <= budget:
            from itertools import combinations

            for combo in combinations(range(M), s):
                z = np.zeros(M, dtype=bool)
                z[list(combo)] = True
                rows.append(z)
            budget -= stratum
        else:
            seen: set[tuple] = set()
            while len(seen) < budget:
                combo = tuple(sorted(rng.permutation(M)[:s].tolist()))
                if combo not in seen:
                    seen.add(combo)
            for combo in sorted(seen):
                z = np.zeros(M, dtype=bool)
                z[list(combo)] = True
                rows.append(z)
            budget = 0
    return np.array(rows, dtype=bool)


def _solve_constrained_wls(Z: np.ndarray, y: np.ndarray, w: np.ndarray,
                           total: float) -> np.ndarray:
    """Solve min sum w (y - Z phi)^2 subject to sum(phi) = total.

    The constraint is enforced by eliminating the last variable.
    """
    M = Z.shape[1]
    zl = Z[:, -1].astype(float)
    A = Z[:, :-1].astype(float) - zl[:, None]
    r = y - zl * total
    Aw = A * w[:, None]
    G = Aw.T @ A
    b = Aw.T @ r
    try:
        head = np.linalg.solve(G, b)
    except np.linalg.LinAlgError:
        G = G + 1e-10 * np.eye(M - 1)
        head = np.linalg.solve(G, b)
    if not np.all(np.isfinite(head)):
        raise SingularSystem("constrained WLS produced non-finite coefficients")
    return np.append(head, total - head.sum())


def kernel_shap_values(value_fn, M: int, n_samples: int, seed: int,
                       max_retries: int = 3) -> tuple[np.ndarray, float]:
    """Kernel SHAP: weighted least squares over sampled coalitions.

    Returns (phi, base).  Exactly reproduces the Shapley values when the
    sample covers all proper coalitions.
    """
    if M < 2:
        raise ArgumentError("kernel SHAP needs at least 2 units")
    if n_samples < M + 2 and n_samples < 2**M - 2:
        raise ArgumentError(f"n_samples must be >= M+2 = {M + 2}")
    n_samples = min(n_samples, 2**M - 2)
    empty_full = np.zeros((2, M), dtype=bool)
    empty_full[1] = True
    v_empty, v_full = np.asarray(value_fn(empty_full), dtype=float)
    total = v_full - v_empty

    rng = np.random.default_rng(seed)
    last_err: Exception | None = None
    for _ in range(max_retries + 1):
        Z = sample_coalitions(M, n_samples, rng)
        y = np.asarray(value_fn(Z), dtype=float) - v_empty
        w = np.array([shapley_kernel_weight(M, int(s)) for s in Z.sum(axis=1)])
        try:
            phi = _solve_constrained_wls(Z, y, w, total)
            return phi, float(v_empty)
        except SingularSystem as exc:  # resample with fresh coalitions
            last_err = exc
    raise SingularSystem(f"kernel SHAP stayed singular after {max_retries} retries: {last_err}")


def linear_shap_values(weights: np.ndarray, bias: float, x: np.ndarray,
                       background_mean: np.ndarray) -> tuple[np.ndarray, float]:
    """Closed form for linear models: phi_i = w_i (x_i - mu_i), base = w.mu + b."""
    w = np.asarray(weights, dtype=float)
    x = np.asarray(x, dtype=float)
    mu = np.asarray(background_mean, dtype=float)
    if not (w.shape == x.shape == mu.shape):
        from .errors import ShapeError

        raise ShapeError(f"shape mismatch: w{w.shape} x{x.shape} mu{mu.shape}")
    return w * (x - mu), float(w @ mu.ravel() if w.ndim == 1 else (w * mu).sum()) + float(bias)
