"""Declarative training-set recipes and tagged training-file emission.

Model families: ``N`` (neural, seeded from authentic data), ``R`` (seeded from
the rule-based system ``R1``) and ``L`` (seeded from the LLM ``L1``).  For a
family ``X``:

    X1  authentic pairs only (only N1 is a trained model)
    X2  authentic + Ladin monolingual back-translated with X1
    X3  X2 + Italian monolingual back-translated with X2
    X4  authentic + Ladin and Italian monolingual back-translated with X3
    X5  X4 + the same X3 translations used as forward translations
    A1  authentic + the back-translations of N4, R4 and L4
    A2  A1 + the forward translations of N5, R5 and L5

Backend ids are the model names (``N1``, ``R1``, ``N2`` ...); datasets are
``authentic`` (parallel, lvb-ita), ``mono_lvb`` and ``mono_ita``.
"""

from __future__ import annotations

import hashlib
import json
import random
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from ..errors import RecipeError
from ..langs import LANGS, TARGET_TAGS, parse_direction, reverse, split_direction
from .backends import Backend
from .corpus import AUTHENTIC, BACK_TRANSLATED, FORWARD_TRANSLATED, CorpusRecord
from .pipeline import backtranslate

FAMILIES = ("N", "R", "L")

# Fine-tuning settings of the downstream trainer; recorded, never executed here.
TRAINER_SETTINGS = {
    "base_model": "Helsinki-NLP/opus-mt-ine-ine",
    "batch_size": 16,
    "max_source_tokens": 128,
    "max_target_tokens": 128,
    "eval_every_steps": 16000,
    "early_stopping_evaluations": 3,
    "early_stopping_min_delta_chrf": 0.2,
    "target_tags": TARGET_TAGS,
}


@dataclass(frozen=True)
class Dataset:
    name: str
    kind: str  # parallel | monolingual
    lang: str | None = None  # monolingual language
    direction: str | None = None  # parallel direction
    records: tuple[CorpusRecord, ...] = ()
    sentences: tuple[str, ...] = ()

    @classmethod
    def parallel(cls, name: str, records: Iterable[CorpusRecord], direction: str = "lvb-ita") -> "Dataset":
        return cls(name, "parallel", direction=parse_direction(direction), records=tuple(records))

    @classmethod
    def monolingual(cls, name: str, lang: str, sentences: Iterable[str]) -> "Dataset":
        if lang not in LANGS:
            raise RecipeError(f"dataset {name}: unknown language {lang!r}")
        return cls(name, "monolingual", lang=lang, sentences=tuple(sentences))


@dataclass(frozen=True)
class Component:
    kind: str  # authentic | back-translated | forward-translated
    dataset: str
    direction: str
    backend: str | None = None

    def describe(self) -> str:
        via = f" via {self.backend}" if self.backend else ""
        return f"{self.kind}:{self.dataset}:{self.direction}{via}"


@dataclass(frozen=True)
class Recipe:
    name: str
    components: tuple[Component, ...]
    description: str = ""
    metadata: Mapping = field(default_factory=lambda: dict(TRAINER_SETTINGS))

    def __post_init__(self):
        if not any(c.kind == AUTHENTIC for c in self.components):
            raise RecipeError(f"recipe {self.name}: every recipe includes the authentic parallel data")

    def backends(self) -> list[str]:
        return sorted({c.backend for c in self.components if c.backend})


def _auth() -> Component:
    return Component(AUTHENTIC, "authentic", "lvb-ita")


def _bt_lvb(model: str) -> Component:
    return Component(BACK_TRANSLATED, "mono_lvb", "ita-lvb", model)


def _bt_ita(model: str) -> Component:
    return Component(BACK_TRANSLATED, "mono_ita", "lvb-ita", model)


def _ft_lvb(model: str) -> Component:
    return Component(FORWARD_TRANSLATED, "mono_lvb", "lvb-ita", model)


def _ft_ita(model: str) -> Component:
    return Component(FORWARD_TRANSLATED, "mono_ita", "ita-lvb", model)


def standard_recipe(name: str) -> Recipe:
    name = name.strip().upper()
    if name in ("A1", "A2"):
        comps = [_auth()]
        for fam in FAMILIES:
            comps += [_bt_lvb(f"{fam}3"), _bt_ita(f"{fam}3")]
        if name == "A2":
            for fam in FAMILIES:
                comps += [_ft_lvb(f"{fam}3"), _ft_ita(f"{fam}3")]
        desc = "authentic + N4/R4/L4 back-translations" + (" + forward translations" if name == "A2" else "")
        return Recipe(name, tuple(comps), desc)
    if len(name) != 2 or name[0] not in FAMILIES or name[1] not in "12345":
        raise RecipeError(f"unknown recipe {name!r}; expected N1-N5, R2-R5, L2-L5, A1 or A2")
    fam, k = name[0], int(name[1])
    if k == 1:
        if fam != "N":
            raise RecipeError(f"{name} is a translation system, not a training recipe")
        return Recipe(name, (_auth(),), "authentic parallel data only")
    if k == 2:
        return Recipe(name, (_auth(), _bt_lvb(f"{fam}1")), f"authentic + Ladin monolingual BT with {fam}1")
    if k == 3:
        return Recipe(
            name, (_auth(), _bt_lvb(f"{fam}1"), _bt_ita(f"{fam}2")), f"{fam}2 data + Italian monolingual BT with {fam}2"
        )
    comps = [_auth(), _bt_lvb(f"{fam}3"), _bt_ita(f"{fam}3")]
    desc = f"authentic + Ladin and Italian monolingual BT with {fam}3"
    if k == 5:
        comps += [_ft_lvb(f"{fam}3"), _ft_ita(f"{fam}3")]
        desc += f" + FT with {fam}3"
    return Recipe(name, tuple(comps), desc)


STANDARD_RECIPES = tuple(
    ["N1"] + [f"{f}{k}" for f in FAMILIES for k in range(2, 6)] + ["A1", "A2"]
)


def recipe_from_config(name: str, spec: Mapping) -> Recipe:
    comps = []
    for c in spec.get("components", []):
        try:
            comps.append(Component(c["kind"], c["dataset"], parse_direction(c["direction"]), c.get("backend")))
        except (KeyError, ValueError) as exc:
            raise RecipeError(f"recipe {name}: bad component {c!r}: {exc}") from None
    return Recipe(name, tuple(comps), spec.get("description", ""), dict(TRAINER_SETTINGS, **spec.get("metadata", {})))


@dataclass
class Registry:
    datasets: Mapping[str, Dataset]
    backends: Mapping[str, Backend]
    bt_options: Mapping = field(default_factory=dict)  # passed to backtranslate
    _cache: dict = field(default_factory=dict, repr=False)

    def dataset(self, name: str) -> Dataset:
        if name not in self.datasets:
            raise RecipeError(f"missing dataset {name!r} (have {', '.join(sorted(self.datasets)) or 'none'})")
        return self.datasets[name]

    def backend(self, id: str) -> Backend:
        if id not in self.backends:
            raise RecipeError(f"missing backend {id!r} (have {', '.join(sorted(self.backends)) or 'none'})")
        return self.backends[id]

    def back_translations(self, dataset: str, direction: str, backend: str) -> list[CorpusRecord]:
        """Cached, so forward translations reuse the very same synthetic text."""
        key = (dataset, direction, backend)
        if key not in self._cache:
            ds = self.dataset(dataset)
            be = self.backend(backend)
            opts = dict(self.bt_options)
            for name in ("quarantine", "checkpoint"):
                if opts.get(name):
                    base = Path(opts[name])
                    base.mkdir(parents=True, exist_ok=True)
                    opts[name] = base / f"{backend}.{dataset}.{direction}.jsonl"
            self._cache[key] = list(backtranslate(be, ds.sentences, direction, **opts))
        return self._cache[key]


def _component_records(c: Component, reg: Registry) -> list[CorpusRecord]:
    ds = reg.dataset(c.dataset)
    src_lang, tgt_lang = split_direction(c.direction)
    if c.kind == AUTHENTIC:
        if ds.kind != "parallel":
            raise RecipeError(f"{c.describe()}: dataset {ds.name} is not parallel")
        if ds.direction != c.direction:
            raise RecipeError(f"{c.describe()}: direction mismatch, dataset is {ds.direction}")
        return list(ds.records)
    if ds.kind != "monolingual":
        raise RecipeError(f"{c.describe()}: dataset {ds.name} is not monolingual")
    if not c.backend:
        raise RecipeError(f"{c.describe()}: synthetic component needs a backend")
    if c.kind == BACK_TRANSLATED:
        if ds.lang != tgt_lang:
            raise RecipeError(f"{c.describe()}: direction mismatch, back-translation targets must be {ds.lang}")
        return reg.back_translations(c.dataset, c.direction, c.backend)
    if c.kind == FORWARD_TRANSLATED:
        if ds.lang != src_lang:
            raise RecipeError(f"{c.describe()}: direction mismatch, forward-translation sources must be {ds.lang}")
        return [r.flipped() for r in reg.back_translations(c.dataset, reverse(c.direction), c.backend)]
    raise RecipeError(f"unknown component kind {c.kind!r}")


@dataclass(frozen=True)
class Manifest:
    recipe: str
    description: str
    seed: int
    components: tuple[dict, ...]
    counts: tuple[tuple[str, str, str, int], ...]  # (origin, direction, generator, count)
    total: int
    sha256: str
    metadata: Mapping

    def by_origin(self) -> dict[str, int]:
        out: Counter = Counter()
        for origin, _, _, n in self.counts:
            out[origin] += n
        return dict(out)

    def by_generator(self) -> dict[str, int]:
        out: Counter = Counter()
        for _, _, gen, n in self.counts:
            out[gen] += n
        return dict(out)

    def to_json(self) -> str:
        obj = asdict(self)
        obj["counts"] = [dict(zip(("origin", "direction", "generator", "count"), c)) for c in self.counts]
        return json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def corpus_digest(records: Sequence[CorpusRecord]) -> str:
    h = hashlib.sha256()
    for r in records:
        h.update((r.to_json() + "\n").encode("utf-8"))
    return h.hexdigest()


def assemble(recipe: Recipe, registry: Registry, seed: int = 0) -> tuple[list[CorpusRecord], Manifest]:
    """Concatenate the recipe's components, shuffle with ``seed``, and count provenance.

    Component texts are never modified; only their order changes.
    """
    records: list[CorpusRecord] = []
    comp_info = []
    for c in recipe.components:
        recs = _component_records(c, registry)
        records.extend(recs)
        comp_info.append({"component": c.describe(), "records": len(recs)})
    random.Random(seed).shuffle(records)
    counts = Counter((r.origin, r.direction, r.generator) for r in records)
    manifest = Manifest(
        recipe.name,
        recipe.description,
        seed,
        tuple(comp_info),
        tuple((o, d, g, n) for (o, d, g), n in sorted(counts.items())),
        len(records),
        corpus_digest(records),
        dict(recipe.metadata),
    )
    return records, manifest


def training_lines(records: Iterable[CorpusRecord]) -> Iterable[tuple[str, CorpusRecord]]:
    """``(line, record)`` per emitted line.

    Authentic pairs are emitted in both directions; synthetic pairs only in
    their own direction (their target side is the authentic one).
    """
    for r in records:
        views = [r, r.flipped()] if r.origin == AUTHENTIC else [r]
        for v in views:
            tgt_lang = split_direction(v.direction)[1]
            yield f"{TARGET_TAGS[tgt_lang]} {v.src}\t{v.tgt}", v


def emit_training_manifest(records: Iterable[CorpusRecord], out) -> dict[str, int]:
    """Write the tagged ``source<TAB>target`` training file; return line counts."""
    counts: Counter = Counter()
    with open(out, "w", encoding="utf-8") as fh:
        for line, v in training_lines(records):
            fh.write(line + "\n")
            counts["lines"] += 1
            counts[v.direction] += 1
            counts[v.origin] += 1
    return {"lines": counts["lines"], **{k: v for k, v in sorted(counts.items()) if k != "lines"}}
