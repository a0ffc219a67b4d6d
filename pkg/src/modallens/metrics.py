"""Performance metrics (MAE, Pearson corr, F1, Acc7, Acc) and histogram binning."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DegenerateError
from .dataset import Dataset


@dataclass(frozen=True)
class MetricsReport:
    mae: float
    corr: float | None  # None marks an undefined correlation (constant vectors)
    f1: float
    acc7: float
    acc2: float
    n: int

    def to_dict(self) -> dict:
        return {
            "mae": self.mae,
            "corr": self.corr,
            "f1": self.f1,
            "acc7": self.acc7,
            "acc2": self.acc2,
            "n": self.n,
        }


def round_sentiment(values: np.ndarray) -> np.ndarray:
    """Round half away from zero, then clamp to the integer scale [-3, 3]."""
    v = np.asarray(values, dtype=float)
    rounded = np.sign(v) * np.floor(np.abs(v) + 0.5)
    return np.clip(rounded, -3, 3)


def pearson(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size < 2:
        raise DegenerateError("correlation needs at least 2 points")
    da, db = a - a.mean(), b - b.mean()
    na, nb = np.sqrt((da * da).sum()), np.sqrt((db * db).sum())
    if na == 0 or nb == 0:
        raise DegenerateError("correlation undefined on constant vectors")
    return float(np.clip((da * db).sum() / (na * nb), -1.0, 1.0))


def compute_metrics(dataset: Dataset) -> MetricsReport:
    if len(dataset) == 0:
        raise ArgumentError("metrics need at least one instance")
    y = dataset.labels
    yhat = dataset.predictions
    mae = float(np.mean(np.abs(yhat - y)))
    try:
        corr = pearson(yhat, y)
    except DegenerateError:
        corr = None
    acc7 = float(np.mean(round_sentiment(yhat) == round_sentiment(y)))
    # Binary polarity: positive iff value > 0; zero counts as the negative class.
    pos_pred = yhat > 0
    pos_true = y > 0
    acc2 = float(np.mean(pos_pred == pos_true))
    tp = int(np.sum(pos_pred & pos_true))
    fp = int(np.sum(pos_pred & ~pos_true))
    fn = int(np.sum(~pos_pred & pos_true))
    denom = 2 * tp + fp + fn
    f1 = 1.0 if denom == 0 else 2 * tp / denom
    return MetricsReport(mae=mae, corr=corr, f1=f1, acc7=acc7, acc2=acc2, n=len(dataset))


@dataclass(frozen=True)
class Histogram:
    lo: float
    hi: float
    counts: tuple[int, ...]
    underflow: int
    overflow: int

    @property
    def bins(self) -> int:
        return len(self.counts)

    def to_dict(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "counts": list(self.counts),
            "underflow": self.underflow,
            "overflow": self.overflow,
        }


def bin_distribution(values, bins: int, value_range: tuple[float, float]) -> Histogram:
    """Half-open bins [lo_i, hi_i); the last bin is closed so hi is counted."""
    lo, hi = value_range
    if bins < 1:
        raise ArgumentError("bins must be >= 1")
    if not lo < hi:
        raise ArgumentError(f"need lo < hi, got [{lo}, {hi}]")
    v = np.asarray(list(values), dtype=float)
    counts = [0] * bins
    underflow = overflow = 0
    width = (hi - lo) / bins
    for x in v:
        if x < lo:
            underflow += 1
        elif x > hi:
            overflow += 1
        else:
            idx = min(int((x - lo) / width), bins - 1)
            counts[idx] += 1
    return Histogram(lo=lo, hi=hi, counts=tuple(counts), underflow=underflow, overflow=overflow)
