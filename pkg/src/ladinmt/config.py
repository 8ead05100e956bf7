"""Declarative run configuration (JSON).

Layout::

    {
      "version": 1,
      "seed": 0,
      "paths": {"dict": "...", "rules": {"lvb-ita": "...", "ita-lvb": "..."},
                "respell": "...", "abbreviations": "...", "output_dir": "..."},
      "datasets": {"authentic": {"kind": "parallel", "path": "...", "direction": "lvb-ita"},
                   "mono_lvb": {"kind": "monolingual", "lang": "lvb", "path": "..."}},
      "backends": [{"id": "R1", "kind": "internal-rbmt"},
                   {"id": "N1", "kind": "alias", "target": "R1"}],
      "recipes": {"mine": {"components": [{"kind": "authentic", "dataset": "authentic",
                                           "direction": "lvb-ita"}]}},
      "bt": {"batch_size": 16, "attempts": 3, "backoff": 1.0,
             "quarantine_dir": "...", "checkpoint_dir": "..."}
    }

Relative paths resolve against the config file's directory.  Command-line
flags override config values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

from .errors import ConfigError

CONFIG_VERSION = 1
TOP_KEYS = ("version", "seed", "paths", "datasets", "backends", "recipes", "bt")
BT_KEYS = ("batch_size", "attempts", "backoff", "quarantine_dir", "checkpoint_dir", "jobs")


@dataclass
class PipelineConfig:
    seed: int = 0
    paths: dict = field(default_factory=dict)
    datasets: dict = field(default_factory=dict)
    backends: list = field(default_factory=list)
    recipes: dict = field(default_factory=dict)
    bt: dict = field(default_factory=dict)
    base_dir: Path = field(default=Path("."), compare=False)

    def to_json(self) -> dict:
        return {
            "version": CONFIG_VERSION,
            "seed": self.seed,
            "paths": self.paths,
            "datasets": self.datasets,
            "backends": self.backends,
            "recipes": self.recipes,
            "bt": self.bt,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), ensure_ascii=False, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, obj: Mapping, base_dir: Path | str = ".") -> "PipelineConfig":
        if not isinstance(obj, Mapping):
            raise ConfigError("config must be a JSON object")
        unknown = set(obj) - set(TOP_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        if obj.get("version", CONFIG_VERSION) != CONFIG_VERSION:
            raise ConfigError(f"unsupported config version {obj.get('version')!r}")
        bt = dict(obj.get("bt", {}))
        if set(bt) - set(BT_KEYS):
            raise ConfigError(f"unknown bt keys: {', '.join(sorted(set(bt) - set(BT_KEYS)))}")
        backends = list(obj.get("backends", []))
        ids = [b.get("id") for b in backends]
        if len(set(ids)) != len(ids) or None in ids:
            raise ConfigError("every backend needs a unique 'id'")
        cfg = cls(
            int(obj.get("seed", 0)),
            dict(obj.get("paths", {})),
            dict(obj.get("datasets", {})),
            backends,
            dict(obj.get("recipes", {})),
            bt,
            Path(base_dir),
        )
        return cfg

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        path = Path(path)
        try:
            obj = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from None
        return cls.from_json(obj, path.parent)

    def resolve(self, p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else self.base_dir / p

    def path(self, key: str, default=None):
        value = self.paths.get(key)
        return default if value is None else self.resolve(value)

    def rules_path(self, direction: str):
        rules = self.paths.get("rules", {})
        return self.resolve(rules[direction]) if direction in rules else None

    def referenced_paths(self) -> list[Path]:
        out = []
        for key, value in self.paths.items():
            if key == "output_dir":
                continue
            if isinstance(value, dict):
                out += [self.resolve(v) for v in value.values()]
            else:
                out.append(self.resolve(value))
        out += [self.resolve(d["path"]) for d in self.datasets.values() if "path" in d]
        for b in self.backends:
            for key in ("dict", "authentic"):
                if key in b:
                    out.append(self.resolve(b[key]))
            out += [self.resolve(v) for v in b.get("rules", {}).values()]
        return out

    def validate(self) -> None:
        """Fail early when any referenced input path is missing."""
        missing = [str(p) for p in self.referenced_paths() if not p.exists()]
        if missing:
            raise ConfigError("missing paths: " + ", ".join(missing))
        ids = {b["id"] for b in self.backends}
        for b in self.backends:
            if b.get("kind") == "alias" and b.get("target") not in ids:
                raise ConfigError(f"backend {b['id']}: alias target {b.get('target')!r} is not defined")

    # -- builders ---------------------------------------------------------

    def build_backends(self) -> dict:
        from .btx.backends import backend_from_config

        built: dict = {}
        specs = {b["id"]: b for b in self.backends}

        def get(id_, seen=()):
            if id_ in built:
                return built[id_]
            if id_ in seen:
                raise ConfigError(f"alias cycle through backend {id_}")
            spec = specs[id_]
            if spec.get("kind") == "alias":
                if spec.get("target") not in specs:
                    raise ConfigError(f"backend {id_}: alias target {spec.get('target')!r} is not defined")
                built[id_] = get(spec["target"], seen + (id_,))
            else:
                built[id_] = backend_from_config(spec, self.base_dir)
            return built[id_]

        for id_ in specs:
            get(id_)
        return built

    def build_datasets(self) -> dict:
        from .btx.corpus import read_monolingual, read_tsv, read_records
        from .btx.recipes import Dataset

        out = {}
        for name, spec in self.datasets.items():
            kind = spec.get("kind")
            path = self.resolve(spec["path"])
            if kind == "parallel":
                direction = spec.get("direction", "lvb-ita")
                recs = read_records(path, direction) if path.suffix == ".jsonl" else read_tsv(path, direction)
                out[name] = Dataset.parallel(name, recs, direction)
            elif kind == "monolingual":
                out[name] = Dataset.monolingual(name, spec["lang"], read_monolingual(path))
            else:
                raise ConfigError(f"dataset {name}: kind must be 'parallel' or 'monolingual'")
        return out


def fixture_config() -> PipelineConfig:
    """Config over the bundled fixture data; every model id maps to the rule-based system."""
    text = resources.files("ladinmt").joinpath("data/pipeline.json").read_text(encoding="utf-8")
    base = Path(str(resources.files("ladinmt").joinpath("data")))
    return PipelineConfig.from_json(json.loads(text), base)
