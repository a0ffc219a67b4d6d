"""On-disk analysis store: stage artifact layout, fingerprints, atomic writes.

Layout under the store root::

    schema.json             validated feature schema snapshot
    instances.jsonl         validated dataset snapshot
    model.json              builtin provider model (when generated by `demo`)
    meta.json               per-stage fingerprints + configs
    attributions/           one file per instance + manifest.json
    analysis/               triples.jsonl, thresholds.json, groups.json
    templates/              cached template tables keyed by scope fingerprint
    projections/            per-modality projection files + norms.json
"""
from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def fingerprint_of(obj) -> str:
    """Stable sha256 fingerprint of a JSON-serializable object."""
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()[:16]


def write_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def write_json(path: str | Path, obj) -> None:
    write_atomic(path, canonical_json(obj))


def read_json(path: str | Path):
    return json.loads(Path(path).read_text())


class Store:
    """Paths and stage bookkeeping for one analysis store directory."""

    STAGES = ("ingest", "attribute", "analyze", "mine", "project")

    def __init__(self, root: str | Path):
        self.root = Path(root)

    # -- paths ---------------------------------------------------------------
    @property
    def schema_path(self) -> Path:
        return self.root / "schema.json"

    @property
    def instances_path(self) -> Path:
        return self.root / "instances.jsonl"

    @property
    def model_path(self) -> Path:
        return self.root / "model.json"

    @property
    def meta_path(self) -> Path:
        return self.root / "meta.json"

    @property
    def attributions_dir(self) -> Path:
        return self.root / "attributions"

    @property
    def analysis_dir(self) -> Path:
        return self.root / "analysis"

    @property
    def templates_dir(self) -> Path:
        return self.root / "templates"

    @property
    def projections_dir(self) -> Path:
        return self.root / "projections"

    # -- meta / fingerprints -------------------------------------------------
    def meta(self) -> dict:
        if self.meta_path.exists():
            return read_json(self.meta_path)
        return {"stages": {}}

    def stage_fingerprint(self, stage: str) -> str | None:
        return self.meta().get("stages", {}).get(stage, {}).get("fingerprint")

    def record_stage(self, stage: str, fingerprint: str, config: dict | None = None) -> None:
        meta = self.meta()
        meta.setdefault("stages", {})[stage] = {
            "fingerprint": fingerprint,
            "config": config or {},
        }
        done = [s for s in self.STAGES if s in meta["stages"]]
        meta["store_fingerprint"] = fingerprint_of(
            {s: meta["stages"][s]["fingerprint"] for s in done}
        )
        write_json(self.meta_path, meta)

    def store_fingerprint(self) -> str | None:
        return self.meta().get("store_fingerprint")

    def completed_stages(self) -> list[str]:
        return [s for s in self.STAGES if s in self.meta().get("stages", {})]


def resolve_store_dir(explicit: str | None) -> Path:
    """Store dir from the flag, falling back to MODALLENS_STORE, then ./store."""
    if explicit:
        return Path(explicit)
    env = os.environ.get("MODALLENS_STORE")
    return Path(env) if env else Path("store")
