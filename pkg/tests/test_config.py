import json

import pytest

from conftest import DATA
from ladinmt.btx.backends import IdentityBackend, RBMTBackend
from ladinmt.config import PipelineConfig, fixture_config
from ladinmt.errors import ConfigError


def test_fixture_config_round_trip():
    cfg = fixture_config()
    again = PipelineConfig.from_json(json.loads(cfg.dumps()), cfg.base_dir)
    assert again == cfg and again.dumps() == cfg.dumps()
    cfg.validate()


def test_fixture_backends_and_datasets():
    cfg = fixture_config()
    backends = cfg.build_backends()
    assert isinstance(backends["identity"], IdentityBackend)
    assert isinstance(backends["R1"], RBMTBackend)
    assert backends["N3"] is backends["R1"]
    sizes = {k: len(v.records or v.sentences) for k, v in cfg.build_datasets().items()}
    assert sizes == {"authentic": 20, "mono_lvb": 30, "mono_ita": 20}


def test_relative_paths_follow_config_file(tmp_path):
    sub = tmp_path / "conf"
    sub.mkdir()
    (sub / "pipeline.json").write_text(json.dumps({"paths": {"dict": "d"}}), encoding="utf-8")
    cfg = PipelineConfig.load(sub / "pipeline.json")
    assert cfg.path("dict") == sub / "d"
    assert cfg.resolve("/abs/x") == tmp_path.anchor / type(tmp_path)("abs/x")


@pytest.mark.parametrize(
    "obj, match",
    [
        ([], "JSON object"),
        ({"wat": 1}, "unknown config keys: wat"),
        ({"version": 9}, "version"),
        ({"bt": {"retries": 3}}, "unknown bt keys: retries"),
        ({"backends": [{"id": "a", "kind": "identity"}, {"id": "a", "kind": "identity"}]}, "unique"),
        ({"backends": [{"kind": "identity"}]}, "unique"),
    ],
)
def test_rejects_bad_objects(obj, match):
    with pytest.raises(ConfigError, match=match):
        PipelineConfig.from_json(obj)


def test_load_errors(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        PipelineConfig.load(tmp_path / "none.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{", encoding="utf-8")
    with pytest.raises(ConfigError, match="invalid JSON"):
        PipelineConfig.load(bad)


def test_validate_reports_missing_paths(tmp_path):
    cfg = PipelineConfig.from_json(
        {"datasets": {"x": {"kind": "monolingual", "lang": "lvb", "path": "nope.txt"}}}, tmp_path
    )
    with pytest.raises(ConfigError, match="missing paths: .*nope.txt"):
        cfg.validate()


def test_alias_errors():
    dangling = PipelineConfig.from_json({"backends": [{"id": "a", "kind": "alias", "target": "b"}]})
    with pytest.raises(ConfigError, match="not defined"):
        dangling.validate()
    cyc = PipelineConfig.from_json(
        {"backends": [{"id": "a", "kind": "alias", "target": "b"}, {"id": "b", "kind": "alias", "target": "a"}]}
    )
    with pytest.raises(ConfigError, match="cycle"):
        cyc.build_backends()


def test_bad_dataset_kind(tmp_path):
    cfg = PipelineConfig.from_json({"datasets": {"x": {"kind": "weird", "path": str(DATA / "pipeline.json")}}})
    with pytest.raises(ConfigError, match="kind"):
        cfg.build_datasets()
