"""Variant classifier: training, prediction, corpus partitioning, model files."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from ..errors import EmptyCorpusError, TrainingError
from .features import FeatureVocabulary, featurize_many
from .gbdt import Booster, BoostParams, Tree

VARIANTS = ("val-badia", "gherdeina", "fascia", "fodom", "anpezo")
MODEL_FORMAT = "ladinmt-variant-model"
MODEL_VERSION = 1


@dataclass
class VariantModel:
    vocabulary: FeatureVocabulary
    labels: tuple[str, ...]
    booster: Booster
    meta: dict = field(default_factory=dict)

    def scores(self, sentences: Sequence[str]) -> np.ndarray:
        return self.booster.decision_function(featurize_many(self.vocabulary, sentences))

    def to_json(self) -> dict:
        p = self.booster.params
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "labels": list(self.labels),
            "meta": self.meta,
            "params": {
                "rounds": p.rounds,
                "depth": p.depth,
                "learning_rate": p.learning_rate,
                "min_leaf": p.min_leaf,
                "reg_lambda": p.reg_lambda,
                "bins": p.bins,
            },
            "vocabulary": self.vocabulary.to_json(),
            "base": [float(b) for b in self.booster.base],
            "trees": [[t.to_json() for t in trees] for trees in self.booster.trees],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), ensure_ascii=False, sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def loads(cls, text: str) -> "VariantModel":
        obj = json.loads(text)
        if obj.get("format") != MODEL_FORMAT or obj.get("version") != MODEL_VERSION:
            raise TrainingError(f"not a {MODEL_FORMAT} v{MODEL_VERSION} file")
        params = BoostParams(**obj["params"])
        vocab = FeatureVocabulary.from_json(obj["vocabulary"])
        trees = [[Tree.from_json(t, params.depth) for t in per] for per in obj["trees"]]
        booster = Booster(params, len(vocab), np.asarray(obj["base"]), trees)
        return cls(vocab, tuple(obj["labels"]), booster, obj["meta"])

    def save(self, path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "VariantModel":
        return cls.loads(Path(path).read_text(encoding="utf-8"))


def _label_order(present: Iterable[str]) -> tuple[str, ...]:
    present = set(present)
    known = [v for v in VARIANTS if v in present]
    return tuple(known + sorted(present - set(known)))


def split_indices(n: int, split: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    perm = np.random.default_rng(seed).permutation(n)
    cut = int(round(n * split))
    return np.sort(perm[:cut]), np.sort(perm[cut:])


def train(
    corpus: Sequence[tuple[str, str]],
    split: float = 0.75,
    params: BoostParams = BoostParams(),
    seed: int = 0,
    n: int = 3,
    top_k: int = 2500,
) -> tuple[VariantModel, float]:
    """Fit on a seeded ``split`` share of ``(sentence, label)`` pairs.

    Returns the model and its accuracy on the held-out remainder.  The
    n-gram vocabulary comes from the training share only.
    """
    if not corpus:
        raise EmptyCorpusError("empty corpus")
    if not 0 < split < 1:
        raise TrainingError(f"split must be in (0, 1), got {split}")
    labels = _label_order(lab for _, lab in corpus)
    if len(labels) < 2:
        raise TrainingError(f"need at least 2 labels, got {list(labels)}")
    train_idx, test_idx = split_indices(len(corpus), split, seed)
    if len(train_idx) == 0 or len(test_idx) == 0:
        raise TrainingError("split leaves an empty training or held-out part")
    sentences = [s for s, _ in corpus]
    label_id = {lab: i for i, lab in enumerate(labels)}
    y = np.asarray([label_id[lab] for _, lab in corpus])

    vocab = FeatureVocabulary.build((sentences[i] for i in train_idx), n, top_k)
    X_train = featurize_many(vocab, [sentences[i] for i in train_idx])
    booster = Booster.fit(X_train, y[train_idx], len(labels), params)
    meta = {
        "seed": seed,
        "split": split,
        "train_sentences": int(len(train_idx)),
        "heldout_sentences": int(len(test_idx)),
    }
    model = VariantModel(vocab, labels, booster, meta)
    pred = np.argmax(model.scores([sentences[i] for i in test_idx]), axis=1)
    accuracy = float(np.mean(pred == y[test_idx]))
    model.meta["heldout_accuracy"] = accuracy
    return model, accuracy


def predict(model: VariantModel, sentences: Iterable[str], chunk: int = 1024) -> Iterator[tuple[str, dict[str, float]]]:
    """Yield ``(label, {label: score})`` per sentence, in input order.

    Scores are log-odds; the top score wins and ties go to the label listed
    first.  An empty sentence is scored like any other all-zero count vector.
    """
    buf: list[str] = []

    def flush():
        scores = model.scores(buf)
        for row in scores:
            best = int(np.argmax(row))
            yield model.labels[best], {lab: float(v) for lab, v in zip(model.labels, row)}

    for s in sentences:
        buf.append(s)
        if len(buf) >= chunk:
            yield from flush()
            buf = []
    if buf:
        yield from flush()


def partition(model: VariantModel, sentences: Iterable[str], outdir) -> dict[str, tuple[int, int]]:
    """Write ``<label>.txt`` per label plus ``counts.tsv``; return ``{label: (sentences, characters)}``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    table = {lab: [0, 0] for lab in model.labels}
    handles = {lab: open(outdir / f"{lab}.txt", "w", encoding="utf-8") for lab in model.labels}
    try:
        for s, (label, _) in zip_stream(sentences, model):
            handles[label].write(s + "\n")
            table[label][0] += 1
            table[label][1] += len(s)
    finally:
        for h in handles.values():
            h.close()
    write_counts(table, outdir / "counts.tsv")
    return {lab: (c[0], c[1]) for lab, c in table.items()}


def zip_stream(sentences: Iterable[str], model: VariantModel, chunk: int = 1024):
    buf: list[str] = []
    for s in sentences:
        buf.append(s)
        if len(buf) >= chunk:
            yield from zip(buf, predict(model, buf, chunk))
            buf = []
    if buf:
        yield from zip(buf, predict(model, buf, chunk))


def write_counts(table, path) -> None:
    lines = ["variant\tsentences\tcharacters"]
    lines += [f"{lab}\t{c[0]}\t{c[1]}" for lab, c in table.items()]
    lines.append(f"total\t{sum(c[0] for c in table.values())}\t{sum(c[1] for c in table.values())}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
