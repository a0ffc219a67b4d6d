"""Shared fixtures: tiny hand-built datasets and a small end-to-end demo store."""
from __future__ import annotations

import numpy as np
import pytest

from modallens import pipeline
from modallens.dataset import Dataset, Instance, Token
from modallens.schema import FeatureSchema
from modallens.store import Store


def tiny_schema() -> FeatureSchema:
    return FeatureSchema(
        modalities={
            "language": ["e0", "e1"],
            "audio": ["F0", "NAQ"],
            "vision": ["Joy", "AU4"],
        },
        feature_sets={
            "language": {},
            "audio": {"Pitch": ["F0"], "Glottal": ["NAQ"]},
            "vision": {"Face emotion": ["Joy"], "Brow": ["AU4"]},
        },
        pos_tagset=["ADJ", "NOUN", "VERB"],
    )


def make_instance(schema: FeatureSchema, iid: str = "i0", T: int = 3,
                  seed: int = 0, label: float = 1.0,
                  prediction: float = 0.5) -> Instance:
    rng = np.random.default_rng(seed)
    words = [("good", "ADJ"), ("movie", "NOUN"), ("like", "VERB"),
             ("bad", "ADJ"), ("story", "NOUN")]
    tokens = tuple(
        Token(words[t % len(words)][0], 0.5 * t, 0.5 * t + 0.4,
              pos=words[t % len(words)][1])
        for t in range(T)
    )
    features = {m: rng.normal(size=(T, schema.dims(m))) for m in schema.modalities}
    return Instance(id=iid, tokens=tokens, features=features,
                    label=label, prediction=prediction)


def make_dataset(schema: FeatureSchema, n: int = 6, T: int = 3) -> Dataset:
    instances = [
        make_instance(schema, f"i{k}", T=T, seed=k,
                      label=float(np.clip(k - 2, -3, 3)),
                      prediction=float(np.clip(k - 2.2, -3, 3)))
        for k in range(n)
    ]
    return Dataset(schema=schema, instances=instances)


@pytest.fixture(scope="session")
def schema():
    return tiny_schema()


@pytest.fixture(scope="session")
def demo_store(tmp_path_factory) -> Store:
    """One small demo pipeline run shared by service/CLI/payload tests."""
    store = Store(tmp_path_factory.mktemp("demo") / "store")
    pipeline.demo(store, seed=7, n=60)
    return store
