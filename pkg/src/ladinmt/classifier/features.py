"""Character n-gram count features."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .gbdt import SparseCounts

_WS_RE = re.compile(r"\s+")


def normalize_text(sentence: str) -> str:
    """Lowercase and collapse whitespace runs to one space."""
    return _WS_RE.sub(" ", sentence.lower()).strip()


def char_ngrams(sentence: str, n: int = 3) -> Counter:
    s = normalize_text(sentence)
    return Counter(s[i : i + n] for i in range(len(s) - n + 1))


@dataclass(frozen=True)
class FeatureVocabulary:
    n: int
    top_k: int
    grams: tuple[str, ...]
    counts: tuple[int, ...]  # training-set frequency of each gram

    def __post_init__(self):
        object.__setattr__(self, "_index", {g: i for i, g in enumerate(self.grams)})

    @classmethod
    def build(cls, sentences: Iterable[str], n: int = 3, top_k: int = 2500) -> "FeatureVocabulary":
        """Most frequent n-grams; ties go to the lexicographically smaller gram."""
        total: Counter = Counter()
        for s in sentences:
            total.update(char_ngrams(s, n))
        ranked = sorted(total.items(), key=lambda kv: (-kv[1], kv[0]))[:top_k]
        return cls(n, top_k, tuple(g for g, _ in ranked), tuple(c for _, c in ranked))

    def __len__(self):
        return len(self.grams)

    def index(self, gram: str) -> int | None:
        return self._index.get(gram)

    def to_json(self) -> dict:
        return {"n": self.n, "top_k": self.top_k, "grams": [[g, c] for g, c in zip(self.grams, self.counts)]}

    @classmethod
    def from_json(cls, obj: dict) -> "FeatureVocabulary":
        grams = obj["grams"]
        return cls(obj["n"], obj["top_k"], tuple(g for g, _ in grams), tuple(c for _, c in grams))


def featurize(vocab: FeatureVocabulary, sentence: str) -> dict[int, int]:
    """Sparse counts ``{feature index: count}`` of in-vocabulary n-grams."""
    out = {}
    for gram, c in char_ngrams(sentence, vocab.n).items():
        i = vocab.index(gram)
        if i is not None:
            out[i] = c
    return dict(sorted(out.items()))


def featurize_many(vocab: FeatureVocabulary, sentences: Sequence[str]) -> SparseCounts:
    rows, cols, vals = [], [], []
    for r, s in enumerate(sentences):
        feats = featurize(vocab, s)
        rows.extend([r] * len(feats))
        cols.extend(feats.keys())
        vals.extend(feats.values())
    return SparseCounts(
        np.asarray(rows, dtype=np.int32),
        np.asarray(cols, dtype=np.int32),
        np.asarray(vals, dtype=np.int32),
        (len(sentences), len(vocab)),
    )
