"""Influential-feature itemsets and frequent-template mining (FP-growth).

Items identify either a whole feature set ("ADJ", "Pitch", "Brow") or one
concrete feature within a set (the word "not", "F0", "Joy").  Sign information
lives in the summary distributions only, never in item identity.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .attribution import AttributionStore
from .dataset import Dataset
from .errors import ArgumentError, MissingAttribution
from .schema import MODALITIES

DEFAULT_CUTOFF_PERCENTILE = 90.0
DEFAULT_MIN_SUPPORT = 0.05
APRIORI_ITEM_GUARD = 16


@dataclass(frozen=True, order=True)
class Item:
    modality: str
    set_name: str | None
    feature: str | None  # None for set-level items
    level: str  # "set" | "feature"

    def key(self) -> str:
        return "|".join([self.modality, self.set_name or "", self.feature or "", self.level])

    def to_dict(self) -> dict:
        return {
            "modality": self.modality,
            "set_name": self.set_name,
            "feature": self.feature,
            "level": self.level,
        }


def _sort_key(item: Item) -> tuple:
    return (item.modality, item.level, item.set_name or "", item.feature or "")


@dataclass
class Transaction:
    instance_id: str
    items: frozenset[Item]
    # signed phi accumulated per item for this instance (summary distributions)
    item_phi: dict[Item, float] = field(default_factory=dict)


def build_itemsets(dataset: Dataset, attributions: AttributionStore,
                   cutoff_percentile: float = DEFAULT_CUTOFF_PERCENTILE,
                   scope: set[str] | None = None) -> list[Transaction]:
    """One transaction per instance from its influential attribution units.

    A unit is influential when |phi| >= the per-modality percentile cutoff
    computed over the whole dataset.  Audio/vision items come from the
    feature-level pass (set + concrete feature); language items come from the
    word-level pass (token POS set + word).  Instances without attribution
    records are skipped and reported via MissingAttribution if none exist.
    """
    schema = dataset.schema
    ids = [i.id for i in dataset if scope is None or i.id in scope]

    # Per-modality cutoffs over all instances with records (dataset-wide, so a
    # brushed scope sees the same notion of "influential").
    pools: dict[str, list[float]] = {m: [] for m in MODALITIES}
    for inst in dataset:
        if inst.id not in attributions.records:
            continue
        feat_rec = attributions.get(inst.id, "feature")
        word_rec = attributions.get(inst.id, "timestep")
        for m in ("audio", "vision"):
            pools[m].extend(np.abs(feat_rec.modality_phi(m)).tolist())
        pools["language"].extend(np.abs(word_rec.modality_phi("language")).tolist())
    cutoffs = {
        m: (float(np.percentile(pools[m], cutoff_percentile)) if pools[m] else np.inf)
        for m in MODALITIES
    }

    transactions = []
    for iid in ids:
        if iid not in attributions.records:
            continue
        inst = dataset[iid]
        feat_rec = attributions.get(iid, "feature")
        word_rec = attributions.get(iid, "timestep")
        item_phi: dict[Item, float] = {}

        for m in ("audio", "vision"):
            names = schema.modalities[m]
            for unit, phi in zip(feat_rec.units, feat_rec.phi):
                if unit.modality != m or abs(phi) < cutoffs[m]:
                    continue
                feature = names[unit.index[0]]
                set_name = schema.set_of(m, feature)
                if set_name is not None:
                    set_item = Item(m, set_name, None, "set")
                    item_phi[set_item] = item_phi.get(set_item, 0.0) + float(phi)
                feat_item = Item(m, set_name, feature, "feature")
                item_phi[feat_item] = item_phi.get(feat_item, 0.0) + float(phi)

        for unit, phi in zip(word_rec.units, word_rec.phi):
            if unit.modality != "language" or abs(phi) < cutoffs["language"]:
                continue
            token = inst.tokens[unit.index[0]]
            if token.pos is not None:
                set_item = Item("language", token.pos, None, "set")
                item_phi[set_item] = item_phi.get(set_item, 0.0) + float(phi)
            word_item = Item("language", token.pos, token.text, "feature")
            item_phi[word_item] = item_phi.get(word_item, 0.0) + float(phi)

        transactions.append(Transaction(iid, frozenset(item_phi), item_phi))
    if not transactions and ids:
        raise MissingAttribution("no instances in scope have attribution records")
    return transactions


# --- FP-growth ---------------------------------------------------------------

class _FPNode:
    __slots__ = ("item", "count", "parent", "children", "link")

    def __init__(self, item, parent):
        self.item = item
        self.count = 0
        self.parent = parent
        self.children: dict = {}
        self.link = None


def _fp_insert(root: _FPNode, items: list, count: int, header: dict) -> None:
    node = root
    for item in items:
        child = node.children.get(item)
        if child is None:
            child = _FPNode(item, node)
            node.children[item] = child
            head = header[item]
            child.link = head[1]
            header[item] = (head[0], child)
        child.count += count
        node = child


def _fp_mine(itemsets: list, header_counts: dict, header_nodes: dict,
             suffix: tuple, min_count: int, order: dict) -> None:
    # Items in ascending frequency order so conditional trees stay small.
    for item in sorted(header_counts, key=lambda i: (header_counts[i], order[i])):
        support = header_counts[item]
        new_suffix = (item,) + suffix
        itemsets.append((new_suffix, support))
        # Build conditional pattern base for this item.
        cond: list[tuple[list, int]] = []
        node = header_nodes[item]
        while node is not None:
            path = []
            parent = node.parent
            while parent.item is not None:
                path.append(parent.item)
                parent = parent.parent
            if path:
                cond.append((list(reversed(path)), node.count))
            node = node.link
        if not cond:
            continue
        counts: dict = {}
        for path, cnt in cond:
            for it in path:
                counts[it] = counts.get(it, 0) + cnt
        counts = {it: c for it, c in counts.items() if c >= min_count}
        if not counts:
            continue
        root = _FPNode(None, None)
        header = {it: (c, None) for it, c in counts.items()}
        for path, cnt in cond:
            kept = [it for it in path if it in counts]
            kept.sort(key=lambda it: (-counts[it], order[it]))
            _fp_insert(root, kept, cnt, header)
        _fp_mine(itemsets, {it: c for it, (c, _) in header.items()},
                 {it: n for it, (_, n) in header.items()},
                 new_suffix, min_count, order)


def fp_growth(transactions: list[Transaction], min_support: float) -> list[tuple[frozenset[Item], int]]:
    """Frequent itemsets with exact support counts via an FP-tree.

    Output order: support descending, then lexicographic on the sorted item
    keys, so results are deterministic.
    """
    if not 0 < min_support <= 1:
        raise ArgumentError(f"min_support={min_support} outside (0, 1]")
    n = len(transactions)
    if n == 0:
        return []
    min_count = max(1, int(np.ceil(min_support * n - 1e-9)))
    counts: dict[Item, int] = {}
    for t in transactions:
        for item in t.items:
            counts[item] = counts.get(item, 0) + 1
    counts = {it: c for it, c in counts.items() if c >= min_count}
    if not counts:
        return []
    order = {it: k for k, it in enumerate(sorted(counts, key=_sort_key))}
    root = _FPNode(None, None)
    header = {it: (c, None) for it, c in counts.items()}
    for t in transactions:
        kept = [it for it in t.items if it in counts]
        kept.sort(key=lambda it: (-counts[it], order[it]))
        _fp_insert(root, kept, 1, header)
    itemsets: list[tuple[tuple, int]] = []
    _fp_mine(itemsets, {it: c for it, (c, _) in header.items()},
             {it: nnode for it, (_, nnode) in header.items()}, (), min_count, order)
    result = [(frozenset(items), support) for items, support in itemsets]
    result.sort(key=lambda e: (-e[1], tuple(sorted(i.key() for i in e[0]))))
    return result


def apriori_oracle(transactions: list[Transaction], min_support: float) -> list[tuple[frozenset[Item], int]]:
    """Brute-force level-wise mining; oracle with the same output contract."""
    if not 0 < min_support <= 1:
        raise ArgumentError(f"min_support={min_support} outside (0, 1]")
    n = len(transactions)
    if n == 0:
        return []
    min_count = max(1, int(np.ceil(min_support * n - 1e-9)))
    universe = sorted({item for t in transactions for item in t.items}, key=_sort_key)
    if len(universe) > APRIORI_ITEM_GUARD:
        raise ArgumentError(f"apriori oracle capped at {APRIORI_ITEM_GUARD} distinct items")
    sets = [frozenset(t.items) for t in transactions]

    def support(candidate: frozenset) -> int:
        return sum(1 for s in sets if candidate <= s)

    result = []
    level = [frozenset([it]) for it in universe]
    while level:
        next_seed = []
        for cand in level:
            c = support(cand)
            if c >= min_count:
                result.append((cand, c))
                next_seed.append(cand)
        level = sorted(
            {a | frozenset([b]) for a in next_seed for b in universe if b not in a
             if len(a | frozenset([b])) == len(a) + 1},
            key=lambda s: tuple(sorted(i.key() for i in s)),
        )
        # Keep only candidates whose every subset of size len-1 is frequent.
        frequent = {s for s, _ in result}
        level = [c for c in level
                 if all(c - frozenset([it]) in frequent for it in c)]
    result.sort(key=lambda e: (-e[1], tuple(sorted(i.key() for i in e[0]))))
    return result


# --- Template summaries ------------------------------------------------------

@dataclass
class Template:
    items: list[Item]
    support_count: int
    support_frac: float
    member_ids: list[str]
    importance_values: list[float]  # signed, per member, member order
    error_values: list[float]
    children: list["Template"] = field(default_factory=list)

    def to_dict(self) -> dict:
        imp = self.importance_values
        err = self.error_values
        return {
            "items": [i.to_dict() for i in sorted(self.items, key=_sort_key)],
            "support_count": self.support_count,
            "support_frac": self.support_frac,
            "member_ids": self.member_ids,
            "importance_stats": _stats(imp),
            "error_stats": _stats(err),
            "children": [c.to_dict() for c in self.children],
        }


def _stats(values: list[float]) -> dict:
    if not values:
        return {"min": None, "max": None, "mean": None, "values": []}
    return {
        "min": float(min(values)),
        "max": float(max(values)),
        "mean": float(np.mean(values)),
        "values": [float(v) for v in values],
    }


def _make_template(items: frozenset[Item], support: int, transactions: list[Transaction],
                   dataset: Dataset, n_scope: int) -> Template:
    members = [t for t in transactions if items <= t.items]
    member_ids = sorted(t.instance_id for t in members)
    by_id = {t.instance_id: t for t in members}
    importance = [sum(by_id[iid].item_phi[i] for i in items) for iid in member_ids]
    errors = [dataset[iid].error for iid in member_ids]
    return Template(
        items=sorted(items, key=_sort_key),
        support_count=support,
        support_frac=support / n_scope if n_scope else 0.0,
        member_ids=member_ids,
        importance_values=importance,
        error_values=errors,
    )


def summarize_templates(frequent: list[tuple[frozenset[Item], int]],
                        transactions: list[Transaction], dataset: Dataset,
                        sort_key: str = "support") -> list[Template]:
    """Set-level templates with feature-level refinements nested as children.

    A child extends its parent's items by exactly one feature-level item drawn
    from one of the parent's feature sets, so child members are always a
    subset of the parent's.
    """
    n = len(transactions)
    by_items = dict(frequent)
    top = [(items, sup) for items, sup in frequent
           if items and all(i.level == "set" for i in items)]
    templates = []
    for items, sup in top:
        tpl = _make_template(items, sup, transactions, dataset, n)
        parent_sets = {(i.modality, i.set_name) for i in items}
        for other_items, other_sup in frequent:
            extra = other_items - items
            if len(extra) != 1 or not items <= other_items:
                continue
            (added,) = extra
            if added.level == "feature" and (added.modality, added.set_name) in parent_sets:
                tpl.children.append(
                    _make_template(other_items, other_sup, transactions, dataset, n))
        tpl.children.sort(key=lambda c: (-c.support_count,
                                         tuple(i.key() for i in c.items)))
        templates.append(tpl)

    def order(tpl: Template):
        if sort_key == "support":
            return (-tpl.support_count,)
        if sort_key == "importance":
            vals = tpl.importance_values
            return (-(abs(float(np.mean(vals))) if vals else 0.0),)
        if sort_key == "error":
            return (-(float(np.mean(tpl.error_values)) if tpl.error_values else 0.0),)
        raise ArgumentError(f"unknown sort key {sort_key!r}")

    templates.sort(key=lambda t: order(t) + (tuple(i.key() for i in t.items),))
    return templates
