"""2D projection of instance features plus glyph parameter derivation.

Feature vectors are time-means of each instance's matrices; coordinates come
from seeded exact t-SNE.  Glyph scalars are min-max normalized against
dataset-level constants, which are persisted so re-serving reuses them.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .attribution import AttributionStore
from .dataset import Dataset, Instance
from .errors import ArgumentError, MissingFeature
from .schema import MODALITIES
from .store import Store, fingerprint_of, read_json, write_json
from .tsne import tsne_embed

FACE_PARTS = {"brow": "Brow", "eye": "Eye", "nose": "Nose", "lip": "Lip", "chin": "Chin"}
FACE_EMOTION_SET = "Face emotion"
HEAD_MOVEMENT_SET = "Head movement"
AUDIO_CLASSES = ("Pitch", "Glottal", "Amplitude", "Phase")


def instance_feature_vector(instance: Instance, modality: str) -> np.ndarray:
    """Time-mean of the instance's T x D matrix for one modality."""
    return np.asarray(instance.features[modality], dtype=float).mean(axis=0)


@dataclass
class NormConstants:
    """Per-(modality, feature) min/max of instance-level time-means."""

    mins: dict[str, np.ndarray]
    maxs: dict[str, np.ndarray]

    @classmethod
    def from_dataset(cls, dataset: Dataset) -> "NormConstants":
        mins, maxs = {}, {}
        for m in MODALITIES:
            V = np.stack([instance_feature_vector(inst, m) for inst in dataset])
            mins[m] = V.min(axis=0)
            maxs[m] = V.max(axis=0)
        return cls(mins=mins, maxs=maxs)

    def normalize(self, instance: Instance, modality: str) -> np.ndarray:
        """Feature values mapped to [0, 1]; constant features map to 0."""
        v = instance_feature_vector(instance, modality)
        span = self.maxs[modality] - self.mins[modality]
        out = np.where(span > 0, (v - self.mins[modality]) / np.where(span > 0, span, 1.0), 0.0)
        return np.clip(out, 0.0, 1.0)

    def to_dict(self) -> dict:
        return {
            "mins": {m: self.mins[m].tolist() for m in MODALITIES},
            "maxs": {m: self.maxs[m].tolist() for m in MODALITIES},
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "NormConstants":
        return cls(
            mins={m: np.asarray(doc["mins"][m]) for m in MODALITIES},
            maxs={m: np.asarray(doc["maxs"][m]) for m in MODALITIES},
        )


def _set_indices(dataset: Dataset, modality: str, set_name: str) -> list[int]:
    feats = dataset.schema.feature_sets.get(modality, {}).get(set_name)
    if not feats:
        raise MissingFeature(f"schema lacks {modality} set {set_name!r}")
    names = dataset.schema.modalities[modality]
    return [names.index(f) for f in feats]


def face_glyph_params(instance: Instance, dataset: Dataset, norms: NormConstants) -> dict:
    """Chernoff-face parameters; components whose set is missing become None."""
    nv = norms.normalize(instance, "vision")
    part_intensity = {}
    for part, set_name in FACE_PARTS.items():
        try:
            idx = _set_indices(dataset, "vision", set_name)
            part_intensity[part] = float(np.mean(nv[idx]))
        except MissingFeature:
            part_intensity[part] = None
    try:
        ring = float(np.mean(nv[_set_indices(dataset, "vision", FACE_EMOTION_SET)]))
    except MissingFeature:
        ring = None
    try:
        idx = _set_indices(dataset, "vision", HEAD_MOVEMENT_SET)
        sticks = [float(nv[i]) for i in idx[:3]]
        sticks += [0.0] * (3 - len(sticks))
    except MissingFeature:
        sticks = None
    return {
        "kind": "face",
        "part_intensity": part_intensity,
        "ring": ring,
        "sticks": sticks,
        "background": instance.prediction,
    }


def audio_glyph_params(instance: Instance, dataset: Dataset, norms: NormConstants) -> dict:
    nv = norms.normalize(instance, "audio")
    names = dataset.schema.modalities["audio"]
    sector_radius = {}
    detail_radii = {}
    for cls_name in AUDIO_CLASSES:
        try:
            idx = _set_indices(dataset, "audio", cls_name)
        except MissingFeature:
            sector_radius[cls_name] = None
            detail_radii[cls_name] = None
            continue
        sector_radius[cls_name] = float(np.mean(nv[idx]))
        detail_radii[cls_name] = {names[i]: float(nv[i]) for i in idx}
    return {
        "kind": "audio",
        "sector_radius": sector_radius,
        "detail_radii": detail_radii,
        "inner": instance.prediction,
    }


def word_glyph_params(instance: Instance, attributions: AttributionStore) -> dict:
    """Word with the largest |word-level phi| in the language modality."""
    rec = attributions.get(instance.id, "timestep")
    best_t, best_abs = 0, -1.0
    for unit, phi in zip(rec.units, rec.phi):
        if unit.modality == "language" and abs(phi) > best_abs:
            best_t, best_abs = unit.index[0], abs(phi)
    return {
        "kind": "word",
        "word": instance.tokens[best_t].text if instance.tokens else "",
        "circle": instance.prediction,
    }


@dataclass(frozen=True)
class HeatGrid:
    resolution: int
    bounds: tuple[float, float, float, float]  # xmin, xmax, ymin, ymax
    cells: np.ndarray  # R x R, row-major, weights >= 0
    mode: str

    def to_dict(self) -> dict:
        return {
            "resolution": self.resolution,
            "bounds": list(self.bounds),
            "cells": [[float(v) for v in row] for row in self.cells],
            "mode": self.mode,
        }


def heatmap_grid(points: np.ndarray, weights, resolution: int, bandwidth: float,
                 mode: str = "error", bounds: tuple | None = None) -> HeatGrid:
    """Gaussian-kernel deposition, renormalized so the cell sum equals sum(weights)."""
    if resolution < 1:
        raise ArgumentError("resolution must be >= 1")
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    w = np.asarray(list(weights), dtype=float)
    if len(w) != len(pts):
        raise ArgumentError("weights and points must have equal length")
    if np.any(w < 0):
        raise ArgumentError("weights must be non-negative")
    if bounds is None:
        if len(pts):
            pad = 1e-9
            bounds = (float(pts[:, 0].min()) - pad, float(pts[:, 0].max()) + pad,
                      float(pts[:, 1].min()) - pad, float(pts[:, 1].max()) + pad)
        else:
            bounds = (0.0, 1.0, 0.0, 1.0)
    xmin, xmax, ymin, ymax = bounds
    xs = np.linspace(xmin, xmax, resolution)
    ys = np.linspace(ymin, ymax, resolution)
    grid = np.zeros((resolution, resolution))
    total = w.sum()
    if total > 0 and len(pts):
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        for (px, py), wi in zip(pts, w):
            if wi == 0:
                continue
            grid += wi * np.exp(-((gx - px) ** 2 + (gy - py) ** 2) / (2 * bandwidth**2))
        s = grid.sum()
        if s > 0:
            grid *= total / s
    return HeatGrid(resolution=resolution, bounds=bounds, cells=grid, mode=mode)


@dataclass
class ProjectionConfig:
    perplexity: float = 30.0
    iters: int = 1000
    seed: int = 0
    language_rep: str = "embeddings"  # embeddings | bag-of-words
    heat_resolution: int = 32
    heat_bandwidth_frac: float = 0.08  # fraction of the larger embedding extent

    def to_dict(self) -> dict:
        return {
            "perplexity": self.perplexity,
            "iters": self.iters,
            "seed": self.seed,
            "language_rep": self.language_rep,
            "heat_resolution": self.heat_resolution,
            "heat_bandwidth_frac": self.heat_bandwidth_frac,
        }


def _language_vectors(dataset: Dataset, attributions: AttributionStore,
                      rep: str, cutoff_percentile: float = 90.0) -> np.ndarray:
    if rep == "embeddings":
        return np.stack([instance_feature_vector(i, "language") for i in dataset])
    if rep != "bag-of-words":
        raise ArgumentError(f"unknown language representation {rep!r}")
    # Indicator vectors over the vocabulary of influential words.
    pool = []
    per_instance: dict[str, set[str]] = {}
    for inst in dataset:
        rec = attributions.get(inst.id, "timestep")
        lang = [(u.index[0], abs(p)) for u, p in zip(rec.units, rec.phi)
                if u.modality == "language"]
        pool.extend(a for _, a in lang)
        per_instance[inst.id] = {inst.tokens[t].text for t, a in lang}
    cutoff = float(np.percentile(pool, cutoff_percentile)) if pool else np.inf
    influential: dict[str, set[str]] = {}
    for inst in dataset:
        rec = attributions.get(inst.id, "timestep")
        influential[inst.id] = {
            inst.tokens[u.index[0]].text
            for u, p in zip(rec.units, rec.phi)
            if u.modality == "language" and abs(p) >= cutoff
        }
    vocab = sorted({w for ws in influential.values() for w in ws})
    if not vocab:
        vocab = [""]
    index = {w: i for i, w in enumerate(vocab)}
    V = np.zeros((len(dataset), len(vocab)))
    for r, inst in enumerate(dataset):
        for w in influential[inst.id]:
            V[r, index[w]] = 1.0
    return V


def feasible_perplexity(requested: float, n: int) -> float:
    return float(max(1.0, min(requested, (n - 1) / 3)))


def project_dataset(dataset: Dataset, attributions: AttributionStore,
                    config: ProjectionConfig, store: Store | None = None,
                    upstream_fingerprint: str = "") -> dict[str, dict]:
    """Per-modality projection payloads: coordinates + glyphs + default heat."""
    norms = NormConstants.from_dataset(dataset)
    fp = fingerprint_of({"config": config.to_dict(), "upstream": upstream_fingerprint,
                         "ids": dataset.ids()})
    payloads = {}
    for modality in MODALITIES:
        if modality == "language":
            vectors = _language_vectors(dataset, attributions, config.language_rep)
        else:
            vectors = np.stack([instance_feature_vector(i, modality) for i in dataset])
        perplexity = feasible_perplexity(config.perplexity, len(dataset))
        result = tsne_embed(vectors, perplexity=perplexity, iters=config.iters,
                            seed=config.seed, return_diagnostics=True)
        coords = result.coords
        points = []
        for inst, (x, y) in zip(dataset, coords):
            if modality == "vision":
                glyph = face_glyph_params(inst, dataset, norms)
            elif modality == "audio":
                glyph = audio_glyph_params(inst, dataset, norms)
            else:
                glyph = word_glyph_params(inst, attributions)
            points.append({"id": inst.id, "x": float(x), "y": float(y), "glyph": glyph})
        extent = max(np.ptp(coords[:, 0]), np.ptp(coords[:, 1]), 1e-9)
        heat = heatmap_grid(coords, [i.error for i in dataset], config.heat_resolution,
                            bandwidth=config.heat_bandwidth_frac * extent, mode="error")
        payloads[modality] = {
            "modality": modality,
            "fingerprint": fp,
            "points": points,
            "heat": heat.to_dict(),
            "diagnostics": {
                "perplexity": perplexity,
                "kl_after_exaggeration": result.kl_after_exaggeration,
                "kl_final": result.kl_final,
                "language_rep": config.language_rep if modality == "language" else None,
            },
        }
        if store is not None:
            write_json(store.projections_dir / f"{modality}.json", payloads[modality])
    if store is not None:
        write_json(store.projections_dir / "norms.json", norms.to_dict())
    return payloads


def load_projections(store: Store) -> dict[str, dict]:
    out = {}
    for modality in MODALITIES:
        path = store.projections_dir / f"{modality}.json"
        if path.exists():
            out[modality] = read_json(path)
    return out
