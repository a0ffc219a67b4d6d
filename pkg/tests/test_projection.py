import numpy as np
import pytest

from modallens.attribution import AttributionConfig, attribute_dataset
from modallens.errors import ArgumentError
from modallens.projection import (HeatGrid, NormConstants, ProjectionConfig,
                                  audio_glyph_params, face_glyph_params,
                                  feasible_perplexity, heatmap_grid,
                                  instance_feature_vector, load_projections,
                                  project_dataset, word_glyph_params)
from modallens.providers import LinearProvider
from modallens.schema import MODALITIES
from modallens.store import Store

from conftest import make_dataset, tiny_schema


def _attributed(n=8):
    schema = tiny_schema()
    ds = make_dataset(schema, n=n, T=3)
    rng = np.random.default_rng(30)
    provider = LinearProvider(
        {m: rng.normal(size=schema.dims(m)) for m in MODALITIES}, bias=0.0)
    attr = attribute_dataset(provider, ds,
                             AttributionConfig(method="linear", background="zeros"))
    return ds, attr


def test_feature_vector_is_time_mean():
    ds, _ = _attributed(n=2)
    inst = ds.instances[0]
    np.testing.assert_allclose(instance_feature_vector(inst, "audio"),
                               inst.features["audio"].mean(axis=0))


def test_norm_constants_bound_and_roundtrip():
    ds, _ = _attributed()
    norms = NormConstants.from_dataset(ds)
    for inst in ds:
        for m in MODALITIES:
            v = norms.normalize(inst, m)
            assert (v >= 0).all() and (v <= 1).all()
    back = NormConstants.from_dict(norms.to_dict())
    np.testing.assert_allclose(back.mins["vision"], norms.mins["vision"])


def test_norm_constants_constant_feature_maps_to_zero():
    ds, _ = _attributed()
    norms = NormConstants.from_dataset(ds)
    norms.mins["audio"][0] = norms.maxs["audio"][0] = 1.0
    v = norms.normalize(ds.instances[0], "audio")
    assert v[0] == 0.0


def test_face_glyph_missing_sets_become_none():
    ds, _ = _attributed(n=3)
    norms = NormConstants.from_dataset(ds)
    glyph = face_glyph_params(ds.instances[0], ds, norms)
    assert glyph["kind"] == "face"
    # tiny_schema has Face emotion and Brow only.
    assert glyph["part_intensity"]["brow"] is not None
    assert glyph["part_intensity"]["nose"] is None
    assert glyph["ring"] is not None
    assert glyph["sticks"] is None  # no Head movement set
    assert glyph["background"] == ds.instances[0].prediction


def test_audio_glyph_sectors():
    ds, _ = _attributed(n=3)
    norms = NormConstants.from_dataset(ds)
    glyph = audio_glyph_params(ds.instances[0], ds, norms)
    assert glyph["sector_radius"]["Pitch"] is not None
    assert glyph["detail_radii"]["Glottal"] == {
        "NAQ": pytest.approx(norms.normalize(ds.instances[0], "audio")[1])}
    assert glyph["sector_radius"]["Amplitude"] is None  # not in tiny_schema


def test_word_glyph_picks_strongest_token():
    ds, attr = _attributed(n=3)
    inst = ds.instances[0]
    glyph = word_glyph_params(inst, attr)
    rec = attr.get(inst.id, "timestep")
    lang = [(u.index[0], abs(p)) for u, p in zip(rec.units, rec.phi)
            if u.modality == "language"]
    best_t = max(lang, key=lambda e: e[1])[0]
    assert glyph["word"] == inst.tokens[best_t].text


def test_heatmap_mass_conservation():
    rng = np.random.default_rng(31)
    pts = rng.normal(size=(20, 2))
    weights = rng.uniform(0.0, 2.0, size=20)
    grid = heatmap_grid(pts, weights, resolution=16, bandwidth=0.5)
    assert isinstance(grid, HeatGrid)
    assert grid.cells.sum() == pytest.approx(weights.sum())
    assert (grid.cells >= 0).all()


def test_heatmap_validation():
    with pytest.raises(ArgumentError):
        heatmap_grid(np.zeros((2, 2)), [1.0], resolution=4, bandwidth=0.1)
    with pytest.raises(ArgumentError):
        heatmap_grid(np.zeros((1, 2)), [-1.0], resolution=4, bandwidth=0.1)
    with pytest.raises(ArgumentError):
        heatmap_grid(np.zeros((1, 2)), [1.0], resolution=0, bandwidth=0.1)


def test_heatmap_empty_inputs():
    grid = heatmap_grid(np.zeros((0, 2)), [], resolution=4, bandwidth=0.1)
    assert grid.cells.sum() == 0.0


def test_feasible_perplexity_clamps():
    assert feasible_perplexity(30.0, 200) == 30.0
    assert feasible_perplexity(30.0, 10) == pytest.approx(3.0)
    assert feasible_perplexity(0.2, 10) == 1.0


def test_project_dataset_payloads_and_persistence(tmp_path):
    ds, attr = _attributed(n=12)
    store = Store(tmp_path / "store")
    cfg = ProjectionConfig(perplexity=3, iters=60, seed=4)
    payloads = project_dataset(ds, attr, cfg, store=store, upstream_fingerprint="x")
    assert set(payloads) == set(MODALITIES)
    for m, doc in payloads.items():
        assert len(doc["points"]) == len(ds)
        kinds = {p["glyph"]["kind"] for p in doc["points"]}
        assert kinds == {{"language": "word", "audio": "audio",
                          "vision": "face"}[m]}
        assert doc["heat"]["mode"] == "error"
        assert doc["diagnostics"]["kl_final"] >= 0
    back = load_projections(store)
    assert back["vision"]["points"] == payloads["vision"]["points"]


def test_project_dataset_deterministic():
    ds, attr = _attributed(n=10)
    cfg = ProjectionConfig(perplexity=3, iters=50, seed=9)
    a = project_dataset(ds, attr, cfg)
    b = project_dataset(ds, attr, cfg)
    assert a["audio"]["points"] == b["audio"]["points"]


def test_bag_of_words_language_rep():
    ds, attr = _attributed(n=10)
    cfg = ProjectionConfig(perplexity=3, iters=50, seed=9,
                           language_rep="bag-of-words")
    doc = project_dataset(ds, attr, cfg)["language"]
    assert doc["diagnostics"]["language_rep"] == "bag-of-words"
    assert len(doc["points"]) == len(ds)
