import json
import shutil
from pathlib import Path

import pytest
import yaml

from clonelog import artifacts
from clonelog.cli import run
from clonelog.config import ConfigError, RunConfig, from_dict, load_config

GOLDEN = Path(__file__).parent / "golden"

SNIPPET_WITH_CLONE = """
public IpAddress reserve(Network network, String zone) {
    IpAddress ip = network.acquireAddress(zone);
    if (ip == null) {
        throw new IllegalStateException("no address left in " + zone);
    }
    ip.setState(State.ALLOCATED);
    store.persist(ip);
    return ip;
}
"""

SNIPPET_NO_CLONE = "int add(int a, int b) { return a + b; }"


@pytest.fixture(scope="module")
def pipeline_out(corpus_root, tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    assert run(["pipeline", "--root", str(corpus_root), "--out", str(out)]) == 0
    return out


# configuration ------------------------------------------------------------------

def test_default_config_valid():
    cfg = load_config(None)
    assert cfg.detector.threshold == 0.85 and cfg.lm.profile == "desk"


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError, match="bogus"):
        from_dict({"bogus": 1})
    with pytest.raises(ConfigError, match="detector"):
        from_dict({"detector": {"treshold": 0.9}})
    with pytest.raises(ConfigError):
        from_dict({"lm": {"overrides": {"hiden": 3}}})


def test_invalid_values_rejected():
    with pytest.raises(ConfigError):
        from_dict({"detector": {"threshold": 2}})
    with pytest.raises(ConfigError):
        from_dict({"lm": {"profile": "huge"}})


def test_hash_stable_under_key_order(tmp_path):
    a = {"seed": 3, "detector": {"threshold": 0.9, "sloc_ratio_filter": 2.0}}
    b = {"detector": {"sloc_ratio_filter": 2.0, "threshold": 0.9}, "seed": 3}
    assert from_dict(a).hash() == from_dict(b).hash()
    assert from_dict(a).hash() != RunConfig().hash()
    (tmp_path / "c.yaml").write_text(yaml.safe_dump(b))
    (tmp_path / "c.json").write_text(json.dumps(a))
    assert load_config(tmp_path / "c.yaml").hash() == load_config(tmp_path / "c.json").hash()


# stages -------------------------------------------------------------------------------

def test_pipeline_outputs_embed_hash(pipeline_out):
    h = RunConfig().hash()
    for name in ("methods.jsonl", "features.jsonl", "pairs.csv", "lsd_train.txt", "lsd_test.jsonl", "vocab.tsv", "report.csv"):
        head = artifacts.parse_header((pipeline_out / name).read_text().splitlines()[0])
        assert head["config_hash"] == h, name
    run_doc = json.loads((pipeline_out / "run.json").read_text())
    assert run_doc["config_hash"] == h and "timings_s" in run_doc


def test_stage_refuses_mismatched_inputs(pipeline_out, tmp_path, capsys):
    out = tmp_path / "o"
    shutil.copytree(pipeline_out, out)
    code = run(["detect", "--out", str(out), "--seed", "5"])
    assert code != 0
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "StaleArtifactError"


def test_missing_input_is_reported(tmp_path, capsys):
    assert run(["features", "--out", str(tmp_path)]) != 0
    assert json.loads(capsys.readouterr().err.strip())["error"] == "FileNotFoundError"


def test_bad_config_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("nonsense: true\n")
    assert run(["features", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert json.loads(capsys.readouterr().err.strip())["error"] == "ConfigError"


def test_stage_by_stage_matches_pipeline(corpus_root, pipeline_out, tmp_path):
    out = str(tmp_path)
    for argv in (
        ["ingest", "--root", str(corpus_root)],
        ["features"],
        ["detect"],
        ["corpus"],
        ["train", "--variant", "nlp_1"],
        ["train", "--variant", "nlp_3"],
        ["evaluate"],
    ):
        assert run(argv + ["--out", out]) == 0, argv
    for name in ("pairs.csv", "lsd_test.jsonl", "report.csv", "models/nlp_1.model", "models/nlp_3.model"):
        assert (tmp_path / name).read_bytes() == (pipeline_out / name).read_bytes(), name


def test_suggest_with_clone(pipeline_out, tmp_path, capsys):
    snip = tmp_path / "s.java"
    snip.write_text(SNIPPET_WITH_CLONE)
    assert run(["suggest", "--snippet", str(snip), "--out", str(pipeline_out), "--variant", "nlp_1"]) == 0
    doc = json.loads(capsys.readouterr().out)
    (entry,) = doc["methods"]
    assert entry["needs_log"] is True
    assert entry["candidates"] and entry["candidates"][0]["lsd"]


def test_suggest_without_clone(pipeline_out, tmp_path, capsys):
    snip = tmp_path / "s.java"
    snip.write_text(SNIPPET_NO_CLONE)
    assert run(["suggest", "--snippet", str(snip), "--out", str(pipeline_out)]) == 0
    (entry,) = json.loads(capsys.readouterr().out)["methods"]
    assert entry["needs_log"] is False and entry["candidates"] == []


def test_ngram_model_kind(corpus_root, tmp_path):
    assert run(["pipeline", "--root", str(corpus_root), "--out", str(tmp_path), "--model-kind", "ngram"]) == 0
    assert "nlp_1" in (tmp_path / "report.md").read_text()


def test_report_matches_golden(pipeline_out):
    assert (pipeline_out / "report.csv").read_text() == (GOLDEN / "report.csv").read_text()
