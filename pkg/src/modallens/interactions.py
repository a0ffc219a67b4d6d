"""Modality-importance aggregation, interaction labeling, and threshold search.

Each instance's per-modality importance (I_l, I_a, I_v) is the signed sum of
its feature attributions.  The labeling rules compare *shares* |I_m| / ||I||_1
against the three thresholds, so the (0, 1) threshold domain is meaningful for
arbitrarily scaled attributions.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .attribution import AttributionRecord
from .dataset import Dataset
from .errors import ArgumentError
from .metrics import Histogram, bin_distribution
from .schema import MODALITIES

LABELS = ("dominance", "complement", "conflict", "others")

# Instances whose total influence falls below this dataset percentile are
# routed to "others" regardless of shares; keeps near-zero-influence noise out
# of the typed groups while staying invariant to whole-dataset scaling.
LOW_INFLUENCE_PERCENTILE = 5.0


@dataclass(frozen=True)
class ImportanceTriple:
    instance_id: str
    values: tuple[float, float, float]  # (I_l, I_a, I_v) in MODALITIES order

    @classmethod
    def from_record(cls, record: AttributionRecord) -> "ImportanceTriple":
        return cls(
            instance_id=record.instance_id,
            values=tuple(float(record.modality_phi(m).sum()) for m in MODALITIES),
        )

    @property
    def l1(self) -> float:
        return sum(abs(v) for v in self.values)

    @property
    def net(self) -> float:
        return sum(self.values)

    @property
    def shares(self) -> tuple[float, float, float] | None:
        """Unsigned shares |I_m| / l1, or None when the triple is all-zero."""
        l1 = self.l1
        if l1 == 0:
            return None
        return tuple(abs(v) / l1 for v in self.values)

    @property
    def signed_shares(self) -> tuple[float, float, float]:
        l1 = self.l1
        if l1 == 0:
            return (0.0, 0.0, 0.0)
        return tuple(v / l1 for v in self.values)

    def to_dict(self) -> dict:
        return {
            "id": self.instance_id,
            "I_l": self.values[0],
            "I_a": self.values[1],
            "I_v": self.values[2],
            "shares": list(self.shares) if self.shares else None,
            "net": self.net,
            "l1": self.l1,
        }


@dataclass(frozen=True)
class Thresholds:
    th_sig: float
    th_dom: float
    th_confl: float

    def __post_init__(self):
        for name, v in (("th_sig", self.th_sig), ("th_dom", self.th_dom),
                        ("th_confl", self.th_confl)):
            if not 0 < v < 1:
                raise ArgumentError(f"{name}={v} outside (0, 1)")

    def to_dict(self) -> dict:
        return {"th_sig": self.th_sig, "th_dom": self.th_dom, "th_confl": self.th_confl}


@dataclass(frozen=True)
class InteractionLabel:
    instance_id: str
    label: str
    dominant_modality: str | None = None
    evidence: tuple[str, ...] = ()


def label_interaction(t: ImportanceTriple, th: Thresholds,
                      l1_floor: float = 0.0) -> InteractionLabel:
    """Rule-based interaction label for one importance triple.

    Order of tests: significance gate, dominance, conflict, complement,
    otherwise "others".  ``l1_floor`` is the dataset-relative low-influence
    cutoff (0 disables it).
    """
    l1 = t.l1
    if l1 == 0 or l1 < l1_floor:
        return InteractionLabel(t.instance_id, "others", evidence=("low-influence",))
    shares = t.shares
    if min(shares) <= th.th_sig:
        return InteractionLabel(t.instance_id, "others", evidence=("insignificant-modality",))
    net = t.net
    dominant = None
    best = -1.0
    for m, v, s in zip(MODALITIES, t.values, shares):
        if v * net > 0 and s >= th.th_dom and s > best:
            dominant, best = m, s
    if dominant is not None:
        return InteractionLabel(t.instance_id, "dominance", dominant_modality=dominant,
                                evidence=(f"share({dominant})={best:.4f}>=th_dom",))
    has_opposite = any(t.values[i] * t.values[j] < 0
                       for i in range(3) for j in range(i + 1, 3))
    if has_opposite and abs(net) / l1 <= th.th_confl:
        return InteractionLabel(t.instance_id, "conflict",
                                evidence=(f"|net|/l1={abs(net) / l1:.4f}<=th_confl",))
    has_same = any(t.values[i] * t.values[j] > 0
                   for i in range(3) for j in range(i + 1, 3))
    if has_same:
        return InteractionLabel(t.instance_id, "complement", evidence=("same-sign-pair",))
    return InteractionLabel(t.instance_id, "others", evidence=("no-rule-fired",))


def low_influence_floor(triples: list[ImportanceTriple],
                        percentile: float = LOW_INFLUENCE_PERCENTILE) -> float:
    return float(np.percentile([t.l1 for t in triples], percentile))


def label_dataset(triples: list[ImportanceTriple], th: Thresholds,
                  l1_floor: float | None = None) -> dict[str, InteractionLabel]:
    if l1_floor is None:
        l1_floor = low_influence_floor(triples)
    return {t.instance_id: label_interaction(t, th, l1_floor) for t in triples}


@dataclass
class ThresholdSearchResult:
    best: Thresholds
    objective: float
    trace: list[dict]
    group_means: dict[str, list[float]]
    others_magnitude: float
    grid_step: float


class _TripleArrays:
    """Per-instance scalars that make grid labeling a few vector comparisons."""

    def __init__(self, triples: list[ImportanceTriple], l1_floor: float):
        V = np.array([t.values for t in triples], dtype=float)  # (N, 3)
        self.l1 = np.abs(V).sum(axis=1)
        net = V.sum(axis=1)
        safe = np.where(self.l1 > 0, self.l1, 1.0)
        self.signed_shares = np.where(self.l1[:, None] > 0, V / safe[:, None], 0.0)
        A = np.abs(self.signed_shares)
        self.min_share = np.where(self.l1 > 0, A.min(axis=1), -np.inf)
        cand = np.where(V * net[:, None] > 0, A, -np.inf)
        self.dom_share = cand.max(axis=1)
        prod = V[:, [0, 0, 1]] * V[:, [1, 2, 2]]
        self.has_opposite = (prod < 0).any(axis=1)
        self.has_same = (prod > 0).any(axis=1)
        self.conflict_ratio = np.where(self.l1 > 0, np.abs(net) / safe, np.inf)
        self.low = (self.l1 == 0) | (self.l1 < l1_floor)

    def label_masks(self, th_sig: float, th_dom: float, th_confl: float) -> dict[str, np.ndarray]:
        gated = self.low | (self.min_share <= th_sig)
        dom = ~gated & (self.dom_share >= th_dom)
        confl = ~gated & ~dom & self.has_opposite & (self.conflict_ratio <= th_confl)
        comp = ~gated & ~dom & ~confl & self.has_same
        others = ~(dom | confl | comp)
        return {"dominance": dom, "complement": comp, "conflict": confl, "others": others}


def evaluate_objective(masks: dict[str, np.ndarray], signed_shares: np.ndarray,
                       l1: np.ndarray) -> tuple[float, dict[str, list[float]], float]:
    """Mean pairwise distance between group-mean share vectors minus the
    normalized mean influence of the "others" group."""
    means = {}
    for g in LABELS:
        m = masks[g]
        means[g] = signed_shares[m].mean(axis=0) if m.any() else None
    total = 0.0
    for i, gi in enumerate(LABELS):
        for gj in LABELS:
            if means[gi] is not None and means[gj] is not None:
                total += float(np.linalg.norm(means[gi] - means[gj]))
    pair_term = total / len(LABELS) ** 2
    others = masks["others"]
    mean_l1 = l1.mean()
    if others.any() and mean_l1 > 0:
        others_term = float(l1[others].mean() / mean_l1)
    else:
        others_term = 0.0
    group_means = {g: (means[g].tolist() if means[g] is not None else None) for g in LABELS}
    return pair_term - others_term, group_means, others_term


def optimize_thresholds(triples: list[ImportanceTriple], grid_step: float = 0.05,
                        l1_floor: float | None = None) -> ThresholdSearchResult:
    """Exhaustive grid search of the threshold objective.

    The grid is {grid_step, 2*grid_step, ...} < 1 on each axis, scanned in
    row-major order with first-maximum tie-breaking.
    """
    if not triples:
        raise ArgumentError("need at least one triple")
    if not 0 < grid_step < 1:
        raise ArgumentError(f"grid_step={grid_step} outside (0, 1)")
    if l1_floor is None:
        l1_floor = low_influence_floor(triples)
    arrays = _TripleArrays(triples, l1_floor)
    axis = [round(k * grid_step, 12) for k in range(1, int(1 / grid_step) + 1)
            if k * grid_step < 1 - 1e-12]
    best = None
    best_j = -np.inf
    best_means: dict[str, list[float]] = {}
    best_others = 0.0
    trace: list[dict] = []
    for ts in axis:
        for td in axis:
            for tc in axis:
                masks = arrays.label_masks(ts, td, tc)
                j, means, others_term = evaluate_objective(
                    masks, arrays.signed_shares, arrays.l1)
                trace.append({
                    "thresholds": [ts, td, tc],
                    "objective": j,
                    "sizes": {g: int(masks[g].sum()) for g in LABELS},
                })
                if j > best_j:
                    best, best_j = (ts, td, tc), j
                    best_means, best_others = means, others_term
    return ThresholdSearchResult(
        best=Thresholds(*best),
        objective=float(best_j),
        trace=trace,
        group_means=best_means,
        others_magnitude=best_others,
        grid_step=grid_step,
    )


@dataclass
class GroupSummary:
    label: str
    member_ids: list[str]
    error_series: list[float]
    prediction_histogram: Histogram
    importance_series: dict[str, list[float]]  # modality -> I_m per member, member order
    modality_totals: dict[str, float]  # modality -> sum |I_m| within the group
    modality_order: list[str]  # modalities by in-group total influence, descending
    mean_error: float
    total_influence: float  # sum of member l1

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "member_ids": self.member_ids,
            "error_series": self.error_series,
            "prediction_histogram": self.prediction_histogram.to_dict(),
            "importance_series": self.importance_series,
            "modality_totals": self.modality_totals,
            "modality_order": self.modality_order,
            "mean_error": self.mean_error,
            "total_influence": self.total_influence,
        }


def _chain_order(members: list[ImportanceTriple]) -> list[str]:
    """Greedy nearest-neighbor chain under d(p,q) = max_m |I_m(p) - I_m(q)|.

    Starts from the highest-influence member; ties break by instance id.
    """
    if not members:
        return []
    remaining = sorted(members, key=lambda t: (-t.l1, t.instance_id))
    chain = [remaining.pop(0)]
    while remaining:
        cur = np.array(chain[-1].values)
        best_i = min(
            range(len(remaining)),
            key=lambda i: (
                float(np.max(np.abs(np.array(remaining[i].values) - cur))),
                remaining[i].instance_id,
            ),
        )
        chain.append(remaining.pop(best_i))
    return [t.instance_id for t in chain]


def group_summaries(labels: dict[str, InteractionLabel],
                    triples: dict[str, ImportanceTriple], dataset: Dataset,
                    prediction_bins: int = 14) -> dict[str, GroupSummary]:
    summaries = {}
    for g in LABELS:
        members = [triples[iid] for iid, lab in labels.items() if lab.label == g]
        order = _chain_order(members)
        by_id = {t.instance_id: t for t in members}
        errors = [dataset[iid].error for iid in order]
        preds = [dataset[iid].prediction for iid in order]
        series = {
            m: [by_id[iid].values[k] for iid in order]
            for k, m in enumerate(MODALITIES)
        }
        totals = {m: float(sum(abs(v) for v in series[m])) for m in MODALITIES}
        summaries[g] = GroupSummary(
            label=g,
            member_ids=order,
            error_series=errors,
            prediction_histogram=bin_distribution(preds, prediction_bins, (-3.0, 3.0)),
            importance_series=series,
            modality_totals=totals,
            modality_order=sorted(MODALITIES, key=lambda m: (-totals[m], m)),
            mean_error=float(np.mean(errors)) if errors else 0.0,
            total_influence=float(sum(t.l1 for t in members)),
        )
    return summaries
