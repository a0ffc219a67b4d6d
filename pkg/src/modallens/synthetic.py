"""Synthetic dataset with planted interaction structure.

Each instance gets designed per-modality contributions (dominant, complement,
conflict, or near-zero "others") realized through a linear model with zero
background, so attributions recover the planted importances exactly.
"""
from __future__ import annotations

import numpy as np

from .dataset import Dataset, Instance, Token
from .providers import LinearProvider
from .schema import MODALITIES, FeatureSchema

VOCAB = [
    ("good", "ADJ", 1.2), ("great", "ADJ", 1.4), ("bad", "ADJ", -1.3),
    ("terrible", "ADJ", -1.5), ("not", "PART", -1.1), ("never", "PART", -0.9),
    ("i", "PRON", 0.6), ("you", "PRON", 0.5), ("movie", "NOUN", 0.7),
    ("story", "NOUN", 0.6), ("really", "ADV", 0.8), ("very", "ADV", 0.9),
    ("like", "VERB", 1.0), ("hate", "VERB", -1.2), ("is", "AUX", 0.5),
    ("wow", "INTJ", 1.1),
]

GROUP_PROPORTIONS = (
    ("dominance", 0.30),
    ("complement", 0.30),
    ("conflict", 0.30),
    ("others", 0.10),
)


def demo_schema() -> FeatureSchema:
    return FeatureSchema(
        modalities={
            "language": ["emb_0", "emb_1", "emb_2", "emb_3"],
            "audio": ["F0", "VUV", "NAQ", "MCEP_0", "MCEP_1", "HMPDM_0"],
            "vision": ["Joy", "Sadness", "AU1", "AU4", "AU5", "AU12",
                       "HPitch", "HYaw", "HRoll"],
        },
        feature_sets={
            "language": {},
            "audio": {
                "Pitch": ["F0"],
                "Glottal": ["VUV", "NAQ"],
                "Amplitude": ["MCEP_0", "MCEP_1"],
                "Phase": ["HMPDM_0"],
            },
            "vision": {
                "Face emotion": ["Joy", "Sadness"],
                "Brow": ["AU1", "AU4"],
                "Eye": ["AU5"],
                "Lip": ["AU12"],
                "Head movement": ["HPitch", "HYaw", "HRoll"],
            },
        },
        pos_tagset=["ADJ", "ADP", "ADV", "AUX", "CONJ", "CCONJ", "DET", "INTJ",
                    "NOUN", "NUM", "PART", "PRON", "PROPN", "PUNCT", "SCONJ",
                    "SYM", "VERB", "X"],
    )


def demo_provider(schema: FeatureSchema, rng: np.random.Generator) -> LinearProvider:
    weights = {}
    for m in MODALITIES:
        w = rng.uniform(0.4, 1.2, size=schema.dims(m)) * rng.choice([-1.0, 1.0],
                                                                    size=schema.dims(m))
        weights[m] = w
    return LinearProvider(weights, bias=0.0)


def _planted_shares(group: str, rng: np.random.Generator) -> tuple[np.ndarray, float]:
    """Signed share vector (L1 norm 1) and total influence for one instance.

    Sign patterns are fixed per group (language-led dominance, all-positive
    complement, vision-negative conflict) so the group-mean share vectors are
    well separated and the threshold objective has real structure to find.
    """
    if group == "dominance":
        s = rng.uniform(0.705, 0.745)
        rest = (1 - s) / 2
        shares = np.array([s, rest, rest])
        return shares, rng.uniform(0.8, 1.6)
    if group == "complement":
        while True:
            shares = rng.dirichlet([6.0, 6.0, 6.0])
            if shares.min() >= 0.18 and shares.max() <= 0.44:
                break
        return shares, rng.uniform(0.8, 1.6)
    if group == "conflict":
        net = rng.uniform(0.055, 0.095)
        neg = (1 - net) / 2
        pos_total = (1 + net) / 2
        frac = rng.uniform(0.42, 0.58)
        shares = np.array([pos_total * frac, pos_total * (1 - frac), -neg])
        return shares, rng.uniform(0.8, 1.6)
    # others: one near-silent modality, negligible total influence
    a = rng.uniform(0.4, 0.6)
    shares = np.array([0.015, a, 1 - 0.015 - a])
    return shares, rng.uniform(0.005, 0.05)


def _language_rows(target: float, w: np.ndarray, tokens: list[tuple[str, str]],
                   embeddings: dict[str, np.ndarray]) -> np.ndarray:
    rows = np.stack([embeddings[text] for text, _ in tokens])
    mean_score = float(w @ rows.mean(axis=0))
    scale = target / mean_score
    return rows * scale


def generate(seed: int = 7, n: int = 600) -> tuple[Dataset, LinearProvider, dict[str, str]]:
    """Returns (dataset, provider, true interaction label per instance id)."""
    rng = np.random.default_rng(seed)
    schema = demo_schema()
    provider = demo_provider(schema, rng)

    # Word embeddings whose projection on the language weights matches the
    # word's polarity, so per-word attributions track sentiment-bearing words.
    wl = provider.weights["language"]
    embeddings = {}
    for text, _, polarity in VOCAB:
        base = rng.normal(scale=0.3, size=len(wl))
        base += (polarity - float(wl @ base)) * wl / float(wl @ wl)
        embeddings[text] = base
    pos_of = {text: pos for text, pos, _ in VOCAB}

    group_pool = []
    for g, frac in GROUP_PROPORTIONS:
        group_pool += [g] * int(round(frac * n))
    group_pool = (group_pool + ["complement"] * n)[:n]
    rng.shuffle(group_pool)

    instances = []
    truth = {}
    for i, group in enumerate(group_pool):
        shares, l1 = _planted_shares(group, rng)
        contributions = shares * l1  # (c_l, c_a, c_v)
        T = int(rng.integers(3, 7))
        while True:
            tokens = [VOCAB[j][:2] for j in rng.integers(0, len(VOCAB), size=T)]
            rows = np.stack([embeddings[t] for t, _ in tokens])
            if abs(float(wl @ rows.mean(axis=0))) > 0.2:
                break
        features = {"language": _language_rows(contributions[0], wl, tokens, embeddings)}
        for k, m in ((1, "audio"), (2, "vision")):
            w = provider.weights[m]
            v = contributions[k] * w / float(w @ w)
            noise = rng.normal(scale=0.2, size=(T, len(w)))
            noise -= noise.mean(axis=0)
            features[m] = v[None, :] + noise
        prediction = float(np.clip(contributions.sum(), -3, 3))
        label = float(np.clip(contributions.sum() + rng.normal(scale=0.3), -3, 3))
        toks = tuple(
            Token(text, start_s=0.5 * t, end_s=0.5 * t + 0.4, pos=pos_of[text])
            for t, (text, _) in enumerate(tokens)
        )
        iid = f"inst_{i:04d}"
        instances.append(Instance(id=iid, tokens=toks, features=features,
                                  label=label, prediction=prediction))
        truth[iid] = group
    return Dataset(schema=schema, instances=instances), provider, truth
