"""Feature schema: modality feature lists and their grouping into named sets."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError, SchemaError

MODALITIES = ("language", "audio", "vision")


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered feature names per modality plus the set grouping used for templates.

    ``feature_sets[modality]`` maps a set name (e.g. "Pitch", "Brow") to the
    list of low-level feature names it covers.  Every feature of a modality
    must belong to exactly one set.  Language features are grouped by POS tag
    at itemset-build time, so the language entry may be empty.
    """

    modalities: dict[str, list[str]]
    feature_sets: dict[str, dict[str, list[str]]]
    pos_tagset: list[str] = field(default_factory=list)

    def __post_init__(self):
        if set(self.modalities) != set(MODALITIES):
            raise SchemaError(
                f"modalities must be exactly {MODALITIES}, got {sorted(self.modalities)}"
            )
        for mod, names in self.modalities.items():
            if not names:
                raise SchemaError(f"modality {mod!r} has an empty feature list")
            if len(set(names)) != len(names):
                raise SchemaError(f"modality {mod!r} has duplicate feature names")
        for mod, sets in self.feature_sets.items():
            if mod not in self.modalities:
                raise SchemaError(f"feature_sets references unknown modality {mod!r}")
            seen: dict[str, str] = {}
            for set_name, feats in sets.items():
                for f in feats:
                    if f in seen:
                        raise SchemaError(
                            f"feature {f!r} appears in both {seen[f]!r} and {set_name!r} "
                            f"of modality {mod!r}"
                        )
                    if f not in self.modalities[mod]:
                        raise SchemaError(
                            f"feature {f!r} in set {set_name!r} is not a {mod} feature"
                        )
                    seen[f] = set_name
        if len(set(self.pos_tagset)) != len(self.pos_tagset):
            raise SchemaError("pos_tagset contains duplicates")

    def dims(self, modality: str) -> int:
        return len(self.modalities[modality])

    def set_of(self, modality: str, feature: str) -> str | None:
        """Name of the feature set containing ``feature``, or None if ungrouped."""
        for set_name, feats in self.feature_sets.get(modality, {}).items():
            if feature in feats:
                return set_name
        return None

    def to_dict(self) -> dict:
        return {
            "modalities": self.modalities,
            "feature_sets": self.feature_sets,
            "pos_tagset": self.pos_tagset,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FeatureSchema":
        try:
            return cls(
                modalities={m: list(v) for m, v in doc["modalities"].items()},
                feature_sets={
                    m: {s: list(f) for s, f in sets.items()}
                    for m, sets in doc.get("feature_sets", {}).items()
                },
                pos_tagset=list(doc.get("pos_tagset", [])),
            )
        except (KeyError, AttributeError, TypeError) as exc:
            raise ParseError(f"malformed schema document: {exc}") from exc


def load_schema(path: str | Path) -> FeatureSchema:
    """Load and validate a schema file (JSON with modalities/feature_sets/pos_tagset)."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read schema {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"schema {path} is not an object")
    return FeatureSchema.from_dict(doc)
