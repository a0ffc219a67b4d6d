"""Instance records: word-aligned feature matrices, labels, and ingestion."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError, RangeError, ShapeError
from .schema import MODALITIES, FeatureSchema

SENTIMENT_MIN, SENTIMENT_MAX = -3.0, 3.0


@dataclass(frozen=True)
class Token:
    text: str
    start_s: float
    end_s: float
    pos: str | None = None

    def __post_init__(self):
        if self.start_s < 0 or self.end_s < self.start_s:
            raise RangeError(
                f"token {self.text!r}: bad time span [{self.start_s}, {self.end_s}]"
            )

    def to_dict(self) -> dict:
        d = {"text": self.text, "start_s": self.start_s, "end_s": self.end_s}
        if self.pos is not None:
            d["pos"] = self.pos
        return d


@dataclass(frozen=True)
class Instance:
    """One video-clip record with features row-aligned to its tokens."""

    id: str
    tokens: tuple[Token, ...]
    features: dict[str, np.ndarray]  # modality -> T x D_m float array
    label: float
    prediction: float

    def __post_init__(self):
        T = len(self.tokens)
        for mod in MODALITIES:
            if mod not in self.features:
                raise ShapeError(f"instance {self.id}: missing modality {mod!r}")
            mat = self.features[mod]
            if mat.ndim != 2 or mat.shape[0] != T:
                raise ShapeError(
                    f"instance {self.id}: {mod} matrix is {mat.shape}, expected {T} rows"
                )
            if not np.all(np.isfinite(mat)):
                raise RangeError(f"instance {self.id}: non-finite {mod} feature values")
        for name, v in (("label", self.label), ("prediction", self.prediction)):
            if not (SENTIMENT_MIN <= v <= SENTIMENT_MAX):
                raise RangeError(f"instance {self.id}: {name} {v} outside [-3, 3]")
        for a, b in zip(self.tokens, self.tokens[1:]):
            if b.start_s < a.end_s:
                raise RangeError(f"instance {self.id}: tokens overlap or are unordered")

    @property
    def n_tokens(self) -> int:
        return len(self.tokens)

    @property
    def error(self) -> float:
        return abs(self.prediction - self.label)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "tokens": [t.to_dict() for t in self.tokens],
            "features": {m: self.features[m].tolist() for m in MODALITIES},
            "label": self.label,
            "prediction": self.prediction,
        }

    @classmethod
    def from_dict(cls, doc: dict, schema: FeatureSchema) -> "Instance":
        try:
            tokens = tuple(
                Token(t["text"], float(t["start_s"]), float(t["end_s"]), t.get("pos"))
                for t in doc["tokens"]
            )
            features = {
                m: np.asarray(doc["features"][m], dtype=float) for m in MODALITIES
            }
            inst = cls(
                id=str(doc["id"]),
                tokens=tokens,
                features=features,
                label=float(doc["label"]),
                prediction=float(doc["prediction"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed instance record: {exc}") from exc
        for mod in MODALITIES:
            want = schema.dims(mod)
            got = inst.features[mod].shape[1] if inst.features[mod].size else want
            if inst.features[mod].ndim == 2 and inst.features[mod].shape[1] != want:
                raise ShapeError(
                    f"instance {inst.id}: {mod} has {got} columns, schema says {want}"
                )
        for tok in inst.tokens:
            if tok.pos is not None and schema.pos_tagset and tok.pos not in schema.pos_tagset:
                raise RangeError(f"instance {inst.id}: unknown POS tag {tok.pos!r}")
        return inst


@dataclass
class Dataset:
    schema: FeatureSchema
    instances: list[Instance] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.instances)

    def __iter__(self):
        return iter(self.instances)

    def __getitem__(self, instance_id: str) -> Instance:
        try:
            return self._index[instance_id]
        except AttributeError:
            object.__setattr__(self, "_index", {i.id: i for i in self.instances})
            return self._index[instance_id]

    def ids(self) -> list[str]:
        return [i.id for i in self.instances]

    @property
    def labels(self) -> np.ndarray:
        return np.array([i.label for i in self.instances])

    @property
    def predictions(self) -> np.ndarray:
        return np.array([i.prediction for i in self.instances])

    def dump(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            for inst in self.instances:
                fh.write(json.dumps(inst.to_dict()) + "\n")


def load_instances(path: str | Path, schema: FeatureSchema) -> Dataset:
    """Load line-delimited instance records, failing with the offending line number."""
    path = Path(path)
    instances = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: invalid record: {exc}") from exc
            try:
                instances.append(Instance.from_dict(doc, schema))
            except (ParseError, ShapeError, RangeError) as exc:
                raise type(exc)(f"{path}:{lineno}: {exc}") from exc
    return Dataset(schema=schema, instances=instances)
