"""Instance-level attribution: units, masking, records, and the dataset pass.

A unit selects a slice of one modality's feature matrix at the configured
granularity.  "Absent" units are filled with the background per-dimension
mean, so masking is shape-independent across instances.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, Instance
from .errors import MissingAttribution, ProviderError, ShapeError
from .providers import LinearProvider
from .schema import MODALITIES, FeatureSchema
from .shapley import exact_shapley_values, kernel_shap_values
from .store import Store, fingerprint_of, read_json, write_json

GRANULARITIES = ("feature", "timestep", "cell")


@dataclass(frozen=True)
class AttributionUnit:
    modality: str
    kind: str  # feature | timestep | cell
    index: tuple[int, ...]  # (d,) or (t,) or (t, d)

    def key(self) -> str:
        return f"{self.modality}:{self.kind}:{','.join(map(str, self.index))}"

    @classmethod
    def from_key(cls, key: str) -> "AttributionUnit":
        modality, kind, idx = key.split(":")
        return cls(modality, kind, tuple(int(v) for v in idx.split(",")))


def units_for(instance: Instance, schema: FeatureSchema, granularity: str) -> list[AttributionUnit]:
    """Units partitioning the instance at the given granularity (no overlap, full cover)."""
    units: list[AttributionUnit] = []
    for mod in MODALITIES:
        if granularity == "feature":
            units += [AttributionUnit(mod, "feature", (d,)) for d in range(schema.dims(mod))]
        elif granularity == "timestep":
            units += [AttributionUnit(mod, "timestep", (t,)) for t in range(instance.n_tokens)]
        elif granularity == "cell":
            units += [
                AttributionUnit(mod, "cell", (t, d))
                for t in range(instance.n_tokens)
                for d in range(schema.dims(mod))
            ]
        else:
            raise ValueError(f"unknown granularity {granularity!r}")
    return units


@dataclass(frozen=True)
class BackgroundSet:
    """Per-dimension reference means standing in for 'feature absent'."""

    means: dict[str, np.ndarray]  # modality -> (D_m,)
    size: int

    @classmethod
    def from_instances(cls, instances: list[Instance]) -> "BackgroundSet":
        if not instances:
            raise ShapeError("background set must be non-empty")
        means = {
            m: np.mean([inst.features[m].mean(axis=0) for inst in instances], axis=0)
            for m in MODALITIES
        }
        return cls(means=means, size=len(instances))

    @classmethod
    def zeros(cls, schema: FeatureSchema) -> "BackgroundSet":
        return cls(means={m: np.zeros(schema.dims(m)) for m in MODALITIES}, size=1)

    def to_dict(self) -> dict:
        return {"size": self.size, "means": {m: self.means[m].tolist() for m in MODALITIES}}


def mask_input(instance: Instance, keep: set[AttributionUnit] | list[AttributionUnit],
               background: BackgroundSet) -> dict[str, np.ndarray]:
    """Feature triple where units outside ``keep`` are replaced by background means."""
    keep = set(keep)
    masked = {}
    for mod in MODALITIES:
        x = instance.features[mod]
        out = np.tile(background.means[mod], (x.shape[0], 1))
        masked[mod] = out
    for unit in keep:
        x = instance.features[unit.modality]
        out = masked[unit.modality]
        if unit.kind == "feature":
            (d,) = unit.index
            out[:, d] = x[:, d]
        elif unit.kind == "timestep":
            (t,) = unit.index
            out[t, :] = x[t, :]
        else:
            t, d = unit.index
            out[t, d] = x[t, d]
    return masked


@dataclass(frozen=True)
class AttributionRecord:
    instance_id: str
    granularity: str
    units: tuple[AttributionUnit, ...]
    phi: np.ndarray
    base_value: float
    fx: float  # provider output on the unmasked instance

    def unit_values(self) -> dict[AttributionUnit, float]:
        return dict(zip(self.units, self.phi))

    def modality_phi(self, modality: str) -> np.ndarray:
        return np.array([p for u, p in zip(self.units, self.phi) if u.modality == modality])

    def local_accuracy_gap(self) -> float:
        return abs(float(self.phi.sum()) - (self.fx - self.base_value))

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "granularity": self.granularity,
            "units": [u.key() for u in self.units],
            "phi": [float(v) for v in self.phi],
            "base_value": self.base_value,
            "fx": self.fx,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "AttributionRecord":
        return cls(
            instance_id=doc["instance_id"],
            granularity=doc["granularity"],
            units=tuple(AttributionUnit.from_key(k) for k in doc["units"]),
            phi=np.asarray(doc["phi"], dtype=float),
            base_value=float(doc["base_value"]),
            fx=float(doc["fx"]),
        )


def _coalition_value_fn(provider, instance: Instance, units: list[AttributionUnit],
                        background: BackgroundSet, batch_size: int = 256):
    """Set function over coalitions; evaluates the provider on masked inputs."""

    def value_fn(Z: np.ndarray) -> np.ndarray:
        out = np.empty(len(Z))
        for start in range(0, len(Z), batch_size):
            chunk = Z[start : start + batch_size]
            batch = [
                mask_input(instance, [u for u, on in zip(units, row) if on], background)
                for row in chunk
            ]
            try:
                out[start : start + len(chunk)] = provider.predict(batch)
            except ProviderError:
                raise
            except Exception as exc:
                raise ProviderError(
                    f"provider failed on instance {instance.id} "
                    f"(coalition batch at offset {start}): {exc}"
                ) from exc
        return out

    return value_fn


def _linear_cell_phi(provider: LinearProvider, instance: Instance,
                     background: BackgroundSet) -> tuple[dict[str, np.ndarray], float]:
    """Exact per-cell attributions for the builtin linear provider.

    f depends on time-means, so cell (t, d) contributes w_d (x[t,d] - mu_d) / T.
    """
    T = instance.n_tokens
    cells = {}
    base = provider.bias
    for mod in MODALITIES:
        w = provider.weights[mod]
        mu = background.means[mod]
        cells[mod] = w[None, :] * (instance.features[mod] - mu[None, :]) / T
        base += float(w @ mu)
    return cells, base


def attribute_instance(provider, instance: Instance, schema: FeatureSchema,
                       background: BackgroundSet, granularity: str, method: str,
                       n_samples: int, seed: int) -> AttributionRecord:
    units = units_for(instance, schema, granularity)
    M = len(units)
    if method == "linear":
        if not isinstance(provider, LinearProvider):
            raise ProviderError("method 'linear' requires the builtin linear provider")
        cells, base = _linear_cell_phi(provider, instance, background)
        phi = np.empty(M)
        for i, u in enumerate(units):
            c = cells[u.modality]
            if u.kind == "feature":
                phi[i] = c[:, u.index[0]].sum()
            elif u.kind == "timestep":
                phi[i] = c[u.index[0], :].sum()
            else:
                phi[i] = c[u.index]
        fx = float(provider.predict([instance.features])[0])
        return AttributionRecord(instance.id, granularity, tuple(units), phi, base, fx)

    value_fn = _coalition_value_fn(provider, instance, units, background)
    if method == "exact":
        phi, base = exact_shapley_values(value_fn, M)
    elif method == "kernel":
        phi, base = kernel_shap_values(value_fn, M, n_samples, seed)
    else:
        raise ValueError(f"unknown attribution method {method!r}")
    fx = float(provider.predict([instance.features])[0])
    return AttributionRecord(instance.id, granularity, tuple(units), phi, base, fx)


@dataclass
class AttributionConfig:
    method: str = "exact"  # exact | kernel | linear
    n_samples: int = 2048
    seed: int = 0
    background: str = "dataset-mean"  # dataset-mean | zeros
    background_size: int = 50

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "background": self.background,
            "background_size": self.background_size,
        }


@dataclass
class AttributionStore:
    """In-memory view of the per-instance attribution artifacts."""

    fingerprint: str
    records: dict[str, dict[str, AttributionRecord]] = field(default_factory=dict)
    errors: dict[str, str] = field(default_factory=dict)

    def get(self, instance_id: str, granularity: str = "feature") -> AttributionRecord:
        try:
            return self.records[instance_id][granularity]
        except KeyError:
            raise MissingAttribution(
                f"no {granularity} attribution for instance {instance_id!r}"
            ) from None

    @property
    def complete(self) -> bool:
        return not self.errors


def make_background(dataset: Dataset, config: AttributionConfig) -> BackgroundSet:
    if config.background == "zeros":
        return BackgroundSet.zeros(dataset.schema)
    k = min(config.background_size, len(dataset))
    return BackgroundSet.from_instances(dataset.instances[:k])


def _instance_seed(base_seed: int, instance_id: str) -> int:
    return (base_seed * 1000003 + zlib.crc32(instance_id.encode())) % (2**31)


def attribute_dataset(provider, dataset: Dataset, config: AttributionConfig,
                      store: Store | None = None) -> AttributionStore:
    """Two passes per instance (feature-level and word-level), persisted atomically.

    Provider failures skip the instance and land in the error ledger; partial
    results are persisted and the manifest marked incomplete.
    """
    background = make_background(dataset, config)
    fp = fingerprint_of({"config": config.to_dict(), "n": len(dataset),
                         "ids": dataset.ids(), "background": background.to_dict()})
    result = AttributionStore(fingerprint=fp)
    for inst in dataset:
        seed = _instance_seed(config.seed, inst.id)
        try:
            recs = {
                gran: attribute_instance(provider, inst, dataset.schema, background,
                                         gran, config.method, config.n_samples, seed)
                for gran in ("feature", "timestep")
            }
        except ProviderError as exc:
            result.errors[inst.id] = str(exc)
            continue
        result.records[inst.id] = recs
        if store is not None:
            write_json(store.attributions_dir / f"{inst.id}.json", {
                "instance_id": inst.id,
                "fingerprint": fp,
                "records": {g: r.to_dict() for g, r in recs.items()},
            })
    if store is not None:
        write_json(store.attributions_dir / "manifest.json", {
            "fingerprint": fp,
            "config": config.to_dict(),
            "ids": sorted(result.records),
            "errors": result.errors,
            "complete": result.complete,
        })
    return result


def load_attributions(store: Store) -> AttributionStore:
    manifest_path = store.attributions_dir / "manifest.json"
    if not manifest_path.exists():
        raise MissingAttribution(f"no attribution manifest under {store.attributions_dir}")
    manifest = read_json(manifest_path)
    result = AttributionStore(fingerprint=manifest["fingerprint"],
                              errors=dict(manifest.get("errors", {})))
    for iid in manifest["ids"]:
        doc = read_json(store.attributions_dir / f"{iid}.json")
        result.records[iid] = {
            g: AttributionRecord.from_dict(r) for g, r in doc["records"].items()
        }
    return result
