"""View payload builders shared by the query service and `export`.

All payloads are plain JSON-serializable dicts carrying the analysis
fingerprint, so equal fingerprints plus equal queries yield identical bodies.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .attribution import AttributionStore, load_attributions
from .dataset import Dataset
from .errors import ArgumentError, NotFound, NotReady, RangeError
from .interactions import LABELS
from .metrics import bin_distribution
from .pipeline import MiningParams, load_dataset, mine_scope
from .projection import heatmap_grid, load_projections
from .schema import MODALITIES
from .store import Store, read_json


@dataclass
class BrushQuery:
    group: str
    start: int | None = None
    end: int | None = None
    importance_ranges: dict[str, tuple[float, float]] = field(default_factory=dict)
    prediction_range: tuple[float, float] | None = None


@dataclass
class AnalysisBundle:
    """Immutable snapshot of one completed (or partially completed) analysis."""

    store: Store
    dataset: Dataset
    attributions: AttributionStore
    triples: dict[str, dict]  # id -> triples.jsonl record (with label)
    thresholds: dict
    groups: dict[str, dict]
    projections: dict[str, dict]
    metrics: dict
    mining_params: MiningParams

    @classmethod
    def load(cls, store: Store) -> "AnalysisBundle":
        missing = [s for s in ("ingest", "attribute", "analyze") if
                   store.stage_fingerprint(s) is None]
        if missing:
            raise NotReady(f"analysis incomplete; pending stages: {missing}")
        dataset = load_dataset(store)
        attributions = load_attributions(store)
        triples = {}
        with open(store.analysis_dir / "triples.jsonl") as fh:
            for line in fh:
                if line.strip():
                    doc = json.loads(line)
                    triples[doc["id"]] = doc
        meta = store.meta()
        mining_cfg = meta.get("stages", {}).get("mine", {}).get("config", {})
        return cls(
            store=store,
            dataset=dataset,
            attributions=attributions,
            triples=triples,
            thresholds=read_json(store.analysis_dir / "thresholds.json"),
            groups=read_json(store.analysis_dir / "groups.json"),
            projections=load_projections(store),
            metrics=read_json(store.root / "metrics.json"),
            mining_params=MiningParams(**mining_cfg) if mining_cfg else MiningParams(),
        )

    @property
    def fingerprint(self) -> str:
        return self.store.store_fingerprint() or ""

    # -- payloads -------------------------------------------------------------
    def summary_payload(self) -> dict:
        errors = [inst.error for inst in self.dataset]
        layer1 = {
            "truth_histogram": bin_distribution(
                self.dataset.labels, 14, (-3.0, 3.0)).to_dict(),
            "error_series": errors,
            "mean_error": float(np.mean(errors)),
            "n": len(self.dataset),
        }
        per_mod = []
        for k, m in enumerate(MODALITIES):
            values = [self.triples[i.id][f"I_{m[0]}"] for i in self.dataset
                      if i.id in self.triples]
            per_mod.append({
                "modality": m,
                "total_influence": float(np.sum(np.abs(values))),
                "mean_abs_importance": float(np.mean(np.abs(values))) if values else 0.0,
                "values": [float(v) for v in values],
            })
        per_mod.sort(key=lambda d: -d["total_influence"])
        layer3 = sorted((self.groups[g] for g in LABELS),
                        key=lambda g: -g["total_influence"])
        return {
            "fingerprint": self.fingerprint,
            "thresholds": self.thresholds,
            "layer1": layer1,
            "layer2": per_mod,
            "layer3": layer3,
        }

    def query_group(self, q: BrushQuery) -> list[str]:
        if q.group not in LABELS:
            raise RangeError(f"unknown group {q.group!r}")
        members = self.groups[q.group]["member_ids"]
        start = 0 if q.start is None else q.start
        end = len(members) if q.end is None else q.end
        if not (0 <= start <= end <= len(members)):
            raise RangeError(
                f"member range [{start}, {end}) outside [0, {len(members)}]")
        ids = members[start:end]
        for m, (lo, hi) in (q.importance_ranges or {}).items():
            if m not in MODALITIES:
                raise RangeError(f"unknown modality {m!r}")
            ids = [i for i in ids if lo <= self.triples[i][f"I_{m[0]}"] <= hi]
        if q.prediction_range is not None:
            lo, hi = q.prediction_range
            ids = [i for i in ids if lo <= self.dataset[i].prediction <= hi]
        return ids

    def templates_payload(self, scope_ids: list[str] | None = None,
                          sort_key: str = "support",
                          min_support: float | None = None) -> dict:
        if scope_ids is None:
            scope_ids = self.dataset.ids()
        params = MiningParams(
            min_support=self.mining_params.min_support if min_support is None
            else min_support,
            cutoff_percentile=self.mining_params.cutoff_percentile,
        )
        doc = mine_scope(self.store, self.dataset, self.attributions,
                         scope_ids, params, sort_key=sort_key)
        return {
            "fingerprint": self.fingerprint,
            "scope_fingerprint": doc["scope_fingerprint"],
            "sort": sort_key,
            "params": doc["params"],
            "rows": doc["rows"],
        }

    def projection_payload(self, modality: str, scope_ids: list[str] | None = None,
                           heat_mode: str = "error") -> dict:
        if modality not in self.projections:
            raise ArgumentError(f"no projection for modality {modality!r}")
        if heat_mode not in ("error", "importance"):
            raise ArgumentError(f"unknown heat mode {heat_mode!r}")
        base = self.projections[modality]
        scope = set(self.dataset.ids() if scope_ids is None else scope_ids)
        points = [{**p, "dimmed": p["id"] not in scope} for p in base["points"]]
        scoped = [p for p in points if not p["dimmed"]]
        coords = np.array([[p["x"], p["y"]] for p in scoped]).reshape(-1, 2)
        if heat_mode == "error":
            weights = [self.dataset[p["id"]].error for p in scoped]
        else:
            # Template/importance heat: total attribution magnitude per instance.
            weights = [self.triples[p["id"]]["l1"] for p in scoped]
        all_coords = np.array([[p["x"], p["y"]] for p in points]).reshape(-1, 2)
        extent = max(np.ptp(all_coords[:, 0]), np.ptp(all_coords[:, 1]), 1e-9) if len(points) else 1.0
        bounds = base["heat"]["bounds"]
        heat = heatmap_grid(coords, weights, base["heat"]["resolution"],
                            bandwidth=0.08 * extent, mode=heat_mode,
                            bounds=tuple(bounds))
        return {
            "fingerprint": self.fingerprint,
            "modality": modality,
            "points": points,
            "heat": heat.to_dict(),
            "diagnostics": base["diagnostics"],
        }

    def instance_payload(self, instance_id: str, top_k: int = 3) -> dict:
        try:
            inst = self.dataset[instance_id]
        except KeyError:
            raise NotFound(f"unknown instance {instance_id!r}") from None
        feat = self.attributions.get(instance_id, "feature")
        word = self.attributions.get(instance_id, "timestep")
        word_phi = {m: [0.0] * inst.n_tokens for m in MODALITIES}
        for unit, phi in zip(word.units, word.phi):
            word_phi[unit.modality][unit.index[0]] = float(phi)
        tokens = [
            {**tok.to_dict(), "phi": word_phi["language"][t]}
            for t, tok in enumerate(inst.tokens)
        ]
        feature_table = []
        for unit, phi in zip(feat.units, feat.phi):
            name = self.dataset.schema.modalities[unit.modality][unit.index[0]]
            feature_table.append(
                {"modality": unit.modality, "feature": name, "phi": float(phi)})
        feature_table.sort(key=lambda r: (-abs(r["phi"]), r["modality"], r["feature"]))

        def top_series(modality: str) -> list[dict]:
            rows = [r for r in feature_table if r["modality"] == modality][:top_k]
            names = self.dataset.schema.modalities[modality]
            out = []
            for r in rows:
                d = names.index(r["feature"])
                out.append({
                    "feature": r["feature"],
                    "phi": r["phi"],
                    "values": [float(v) for v in inst.features[modality][:, d]],
                })
            return out

        triple = self.triples.get(instance_id, {})
        return {
            "fingerprint": self.fingerprint,
            "id": instance_id,
            "prediction": inst.prediction,
            "label": inst.label,
            "error": inst.error,
            "base_value": feat.base_value,
            "fx": feat.fx,
            "modality_importance": {
                m: triple.get(f"I_{m[0]}", float(feat.modality_phi(m).sum()))
                for m in MODALITIES
            },
            "interaction": {k: triple.get(k) for k in ("label", "dominant")},
            "tokens": tokens,
            "word_importance": word_phi,
            "acoustic_series": top_series("audio"),
            "visual_series": top_series("vision"),
            "feature_table": feature_table,
        }

    def metrics_payload(self) -> dict:
        return {"fingerprint": self.fingerprint, **self.metrics}

    def meta_payload(self) -> dict:
        meta = self.store.meta()
        return {
            "fingerprint": self.fingerprint,
            "stages": meta.get("stages", {}),
            "n_instances": len(self.dataset),
            "labels": list(LABELS),
            "modalities": list(MODALITIES),
        }
