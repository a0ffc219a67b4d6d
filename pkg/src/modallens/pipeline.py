"""Pipeline stages over the on-disk store.

Each stage derives a fingerprint from its config plus the upstream stage
fingerprint; re-running with unchanged inputs is a no-op.
"""
from __future__ import annotations

import shutil
from dataclasses import dataclass
from pathlib import Path

from .attribution import AttributionConfig, attribute_dataset, load_attributions
from .dataset import Dataset, load_instances
from .errors import IncompleteUpstream
from .interactions import (ImportanceTriple, Thresholds, group_summaries,
                           label_dataset, low_influence_floor, optimize_thresholds)
from .metrics import compute_metrics
from .mining import (DEFAULT_CUTOFF_PERCENTILE, DEFAULT_MIN_SUPPORT,
                     build_itemsets, fp_growth, summarize_templates)
from .projection import ProjectionConfig, project_dataset
from .providers import resolve_provider, save_provider
from .schema import load_schema
from .store import Store, fingerprint_of, read_json, write_json


def _require(store: Store, stage: str) -> str:
    fp = store.stage_fingerprint(stage)
    if fp is None:
        raise IncompleteUpstream(stage)
    return fp


def ingest(store: Store, schema_path: str | Path, instances_path: str | Path) -> str:
    """Validate inputs and snapshot them into the store."""
    schema = load_schema(schema_path)
    dataset = load_instances(instances_path, schema)
    fp = fingerprint_of({
        "schema": schema.to_dict(),
        "ids": dataset.ids(),
        "n": len(dataset),
        "content": Path(instances_path).stat().st_size,
    })
    if store.stage_fingerprint("ingest") == fp and store.instances_path.exists():
        return fp
    store.root.mkdir(parents=True, exist_ok=True)
    write_json(store.schema_path, schema.to_dict())
    if Path(instances_path).resolve() != store.instances_path.resolve():
        shutil.copyfile(instances_path, store.instances_path)
    metrics = compute_metrics(dataset)
    write_json(store.root / "metrics.json", metrics.to_dict())
    store.record_stage("ingest", fp, {"n": len(dataset)})
    return fp


def load_dataset(store: Store) -> Dataset:
    _require(store, "ingest")
    schema = load_schema(store.schema_path)
    return load_instances(store.instances_path, schema)


def _provider_key(provider_spec: str) -> str:
    """Stable provider identity: file-backed specs hash the file content so the
    fingerprint does not depend on where the model file happens to live."""
    kind, _, rest = provider_spec.partition(":")
    if kind in ("linear", "mlp") and Path(rest).exists():
        return f"{kind}:{fingerprint_of(read_json(rest))}"
    return provider_spec


def attribute(store: Store, provider_spec: str, config: AttributionConfig) -> str:
    upstream = _require(store, "ingest")
    fp = fingerprint_of({"upstream": upstream, "config": config.to_dict(),
                         "provider": _provider_key(provider_spec)})
    if (store.stage_fingerprint("attribute") == fp
            and (store.attributions_dir / "manifest.json").exists()):
        return fp
    dataset = load_dataset(store)
    provider = resolve_provider(provider_spec)
    result = attribute_dataset(provider, dataset, config, store=store)
    if result.errors and not result.records:
        from .errors import ProviderError

        raise ProviderError(
            f"provider failed on every instance; first error: "
            f"{next(iter(result.errors.values()))}"
        )
    store.record_stage("attribute", fp, {"config": config.to_dict(),
                                         "provider": _provider_key(provider_spec)})
    return fp


def analyze(store: Store, grid_step: float = 0.05,
            thresholds: Thresholds | None = None) -> str:
    upstream = _require(store, "attribute")
    cfg = {"grid_step": grid_step,
           "thresholds": thresholds.to_dict() if thresholds else None}
    fp = fingerprint_of({"upstream": upstream, "config": cfg})
    if (store.stage_fingerprint("analyze") == fp
            and (store.analysis_dir / "thresholds.json").exists()):
        return fp
    dataset = load_dataset(store)
    attributions = load_attributions(store)
    triples = [ImportanceTriple.from_record(attributions.get(i.id, "feature"))
               for i in dataset if i.id in attributions.records]
    l1_floor = low_influence_floor(triples)
    if thresholds is None:
        result = optimize_thresholds(triples, grid_step, l1_floor=l1_floor)
        best, objective = result.best, result.objective
    else:
        best, objective = thresholds, None
    labels = label_dataset(triples, best, l1_floor=l1_floor)
    groups = group_summaries(labels, {t.instance_id: t for t in triples}, dataset)

    lines = []
    for t in triples:
        doc = t.to_dict()
        lab = labels[t.instance_id]
        doc["label"] = lab.label
        if lab.dominant_modality:
            doc["dominant"] = lab.dominant_modality
        lines.append(doc)
    from .store import canonical_json, write_atomic

    write_atomic(store.analysis_dir / "triples.jsonl",
                 "\n".join(canonical_json(d) for d in lines) + "\n")
    write_json(store.analysis_dir / "thresholds.json", {
        **best.to_dict(),
        "objective": objective,
        "grid_step": grid_step,
        "l1_floor": l1_floor,
    })
    write_json(store.analysis_dir / "groups.json",
               {g: s.to_dict() for g, s in groups.items()})
    store.record_stage("analyze", fp, cfg)
    return fp


@dataclass
class MiningParams:
    min_support: float = DEFAULT_MIN_SUPPORT
    cutoff_percentile: float = DEFAULT_CUTOFF_PERCENTILE

    def to_dict(self) -> dict:
        return {"min_support": self.min_support,
                "cutoff_percentile": self.cutoff_percentile}


def mine_scope(store: Store, dataset: Dataset, attributions, scope_ids: list[str],
               params: MiningParams, sort_key: str = "support") -> dict:
    """Mine (or cache-serve) the template table for one instance scope."""
    key = fingerprint_of({"scope": sorted(scope_ids), "params": params.to_dict(),
                          "upstream": store.stage_fingerprint("attribute")})
    cache_path = store.templates_dir / f"{key}.json"
    if cache_path.exists():
        doc = read_json(cache_path)
    else:
        transactions = build_itemsets(dataset, attributions,
                                      cutoff_percentile=params.cutoff_percentile,
                                      scope=set(scope_ids))
        frequent = fp_growth(transactions, params.min_support)
        templates = summarize_templates(frequent, transactions, dataset)
        doc = {
            "scope_fingerprint": key,
            "params": params.to_dict(),
            "rows": [t.to_dict() for t in templates],
        }
        write_json(cache_path, doc)
        # Serve the canonical on-disk form so fresh and cached responses
        # are byte-identical.
        doc = read_json(cache_path)
    if sort_key != "support":
        # Cached rows are support-ordered; re-sort views on demand.
        import numpy as np

        def row_key(row):
            if sort_key == "importance":
                vals = row["importance_stats"]["values"]
                return -(abs(float(np.mean(vals))) if vals else 0.0)
            vals = row["error_stats"]["values"]
            return -(float(np.mean(vals)) if vals else 0.0)

        doc = {**doc, "rows": sorted(doc["rows"], key=row_key)}
    return doc


def mine(store: Store, params: MiningParams) -> str:
    upstream = _require(store, "analyze")
    fp = fingerprint_of({"upstream": upstream, "params": params.to_dict()})
    if store.stage_fingerprint("mine") == fp:
        return fp
    dataset = load_dataset(store)
    attributions = load_attributions(store)
    mine_scope(store, dataset, attributions, dataset.ids(), params)
    store.record_stage("mine", fp, params.to_dict())
    return fp


def project(store: Store, config: ProjectionConfig) -> str:
    upstream = _require(store, "attribute")
    fp = fingerprint_of({"upstream": upstream, "config": config.to_dict()})
    if (store.stage_fingerprint("project") == fp
            and (store.projections_dir / "norms.json").exists()):
        return fp
    dataset = load_dataset(store)
    attributions = load_attributions(store)
    project_dataset(dataset, attributions, config, store=store,
                    upstream_fingerprint=upstream)
    store.record_stage("project", fp, config.to_dict())
    return fp


def demo(store: Store, seed: int = 7, n: int = 600, grid_step: float = 0.05) -> str:
    """Generate the planted-interaction dataset and run every stage."""
    from . import synthetic

    dataset, provider, truth = synthetic.generate(seed=seed, n=n)
    store.root.mkdir(parents=True, exist_ok=True)
    write_json(store.schema_path, dataset.schema.to_dict())
    dataset.dump(store.instances_path)
    save_provider(provider, store.model_path)
    write_json(store.root / "true_labels.json", truth)
    ingest(store, store.schema_path, store.instances_path)
    attribute(store, f"linear:{store.model_path}",
              AttributionConfig(method="linear", seed=seed, background="zeros"))
    analyze(store, grid_step=grid_step)
    mine(store, MiningParams())
    project(store, ProjectionConfig(seed=seed, iters=400))
    return store.store_fingerprint()
