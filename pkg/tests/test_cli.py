import json

from fastapi.testclient import TestClient

from modallens.cli import main
from modallens.service import create_app
from modallens.store import Store, read_json

from conftest import make_dataset, tiny_schema


def _write_inputs(tmp_path):
    schema_path = tmp_path / "schema.json"
    schema_path.write_text(json.dumps(tiny_schema().to_dict()))
    instances_path = tmp_path / "instances.jsonl"
    make_dataset(tiny_schema(), n=6).dump(instances_path)
    return schema_path, instances_path


def test_usage_errors_exit_1(tmp_path, capsys):
    assert main(["frobnicate"]) == 1
    assert main(["ingest", "--schema", str(tmp_path / "nope.json"),
                 "--instances", str(tmp_path / "nope.jsonl")]) == 1
    assert main(["analyze", "--thresholds", "0.1,0.2",
                 "--store", str(tmp_path / "s")]) == 1
    capsys.readouterr()


def test_validation_errors_exit_2(tmp_path, capsys):
    _, instances = _write_inputs(tmp_path)
    bad_schema = tmp_path / "bad_schema.json"
    bad_schema.write_text("{not json")
    code = main(["ingest", "--schema", str(bad_schema),
                 "--instances", str(instances),
                 "--store", str(tmp_path / "s")])
    assert code == 2
    assert "validation error" in capsys.readouterr().err


def test_incomplete_upstream_exit_4(tmp_path, capsys):
    assert main(["analyze", "--store", str(tmp_path / "empty")]) == 4
    assert main(["mine", "--store", str(tmp_path / "empty")]) == 4
    capsys.readouterr()


def test_provider_errors_exit_3(tmp_path, capsys):
    schema_path, instances_path = _write_inputs(tmp_path)
    store = str(tmp_path / "s")
    assert main(["ingest", "--schema", str(schema_path),
                 "--instances", str(instances_path), "--store", store]) == 0
    code = main(["attribute", "--provider", "subprocess:false",
                 "--method", "exact", "--store", store])
    assert code == 3
    assert "provider error" in capsys.readouterr().err


def test_full_pipeline_and_rerun_noop(tmp_path, capsys):
    schema_path, instances_path = _write_inputs(tmp_path)
    store_dir = str(tmp_path / "s")
    save = tmp_path / "model.json"
    from modallens.providers import LinearProvider, save_provider
    import numpy as np

    rng = np.random.default_rng(0)
    s = tiny_schema()
    save_provider(LinearProvider(
        {m: rng.normal(size=s.dims(m)) for m in s.modalities}, 0.0), save)

    steps = [
        ["ingest", "--schema", str(schema_path), "--instances", str(instances_path)],
        ["attribute", "--provider", f"linear:{save}", "--method", "linear"],
        ["analyze", "--grid-step", "0.25"],
        ["mine"],
        ["project", "--perplexity", "1", "--iters", "30"],
    ]
    for step in steps:
        assert main(step + ["--store", store_dir]) == 0
    first = capsys.readouterr().out
    fp_before = Store(store_dir).store_fingerprint()

    # Re-running every stage with identical inputs is a no-op.
    for step in steps:
        assert main(step + ["--store", store_dir]) == 0
    second = capsys.readouterr().out
    assert first == second
    assert Store(store_dir).store_fingerprint() == fp_before


def test_analyze_with_explicit_thresholds(tmp_path, capsys):
    schema_path, instances_path = _write_inputs(tmp_path)
    store_dir = str(tmp_path / "s")
    save = tmp_path / "model.json"
    from modallens.providers import LinearProvider, save_provider
    import numpy as np

    s = tiny_schema()
    rng = np.random.default_rng(1)
    save_provider(LinearProvider(
        {m: rng.normal(size=s.dims(m)) for m in s.modalities}, 0.0), save)
    assert main(["ingest", "--schema", str(schema_path),
                 "--instances", str(instances_path), "--store", store_dir]) == 0
    assert main(["attribute", "--provider", f"linear:{save}",
                 "--method", "linear", "--store", store_dir]) == 0
    assert main(["analyze", "--thresholds", "0.05,0.6,0.2",
                 "--store", store_dir]) == 0
    capsys.readouterr()
    th = read_json(Store(store_dir).analysis_dir / "thresholds.json")
    assert th["th_dom"] == 0.6
    assert th["objective"] is None


def test_export_matches_service_bodies(demo_store, tmp_path, capsys):
    client = TestClient(create_app(demo_store))
    cases = [
        (["--view", "summary"], "/summary", {}),
        (["--view", "templates"], "/templates", {}),
        (["--view", "projection", "--modality", "audio"],
         "/projection", {"modality": "audio"}),
        (["--view", "instance", "--instance-id", "inst_0002"],
         "/instances/inst_0002", {}),
        (["--view", "metrics"], "/metrics", {}),
        (["--view", "meta"], "/meta", {}),
    ]
    for flags, url, params in cases:
        out = tmp_path / "out.json"
        code = main(["export", *flags, "--out", str(out),
                     "--store", str(demo_store.root)])
        assert code == 0
        exported = json.loads(out.read_text())
        assert exported == client.get(url, params=params).json()
    capsys.readouterr()


def test_export_instance_requires_id(demo_store, capsys):
    assert main(["export", "--view", "instance", "--out", "/tmp/x.json",
                 "--store", str(demo_store.root)]) == 1
    capsys.readouterr()


def test_demo_command(tmp_path, capsys):
    store_dir = str(tmp_path / "demo")
    assert main(["demo", "--seed", "3", "--n", "40", "--store", store_dir]) == 0
    out = capsys.readouterr().out
    assert "demo ok" in out
    assert Store(store_dir).completed_stages() == [
        "ingest", "attribute", "analyze", "mine", "project"]


def test_store_env_fallback(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("MODALLENS_STORE", str(tmp_path / "envstore"))
    assert main(["demo", "--seed", "3", "--n", "30"]) == 0
    capsys.readouterr()
    assert (tmp_path / "envstore" / "meta.json").exists()
