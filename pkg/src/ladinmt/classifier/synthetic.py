"""Synthetic labelled corpora with planted marker trigrams.

Every variant owns one letter that no other variant (and no filler word)
uses; its marker trigrams all contain that letter, so marker sets are
disjoint and a single marker identifies the variant.
"""

from __future__ import annotations

import random

from .model import VARIANTS

_FILLER_LETTERS = "abcdefghilmnoprstuv"
_MARKER_LETTERS = "kqwxzjy"


def _filler_lexicon(rng: random.Random, size: int = 400) -> list[str]:
    words = set()
    while len(words) < size:
        words.add("".join(rng.choice(_FILLER_LETTERS) for _ in range(rng.randint(2, 6))))
    return sorted(words)


def marker_trigrams(labels=VARIANTS, per_label: int = 5, seed: int = 0) -> dict[str, list[str]]:
    if len(labels) > len(_MARKER_LETTERS):
        raise ValueError(f"at most {len(_MARKER_LETTERS)} labels")
    rng = random.Random(seed)
    out = {}
    for label, letter in zip(labels, _MARKER_LETTERS):
        grams = set()
        while len(grams) < per_label:
            a, b = rng.choice(_FILLER_LETTERS), rng.choice(_FILLER_LETTERS)
            grams.add(rng.choice([letter + a + b, a + letter + b, a + b + letter]))
        out[label] = sorted(grams)
    return out


def synthetic_corpus(
    per_label: int = 2000,
    labels=VARIANTS,
    markers_per_label: int = 5,
    rate: float = 0.1,
    tokens: int = 60,
    seed: int = 0,
) -> tuple[list[tuple[str, str]], dict[str, list[str]]]:
    """``per_label`` sentences per label, each token a marker with probability ``rate``.

    Returns ``([(sentence, label), ...], markers)``; sentences are interleaved
    by label in a seeded random order.
    """
    rng = random.Random(seed)
    lexicon = _filler_lexicon(rng)
    markers = marker_trigrams(labels, markers_per_label, seed)
    corpus = []
    for label in labels:
        for _ in range(per_label):
            words = [
                rng.choice(markers[label]) if rng.random() < rate else rng.choice(lexicon)
                for _ in range(tokens)
            ]
            corpus.append((" ".join(words), label))
    rng.shuffle(corpus)
    return corpus, markers
