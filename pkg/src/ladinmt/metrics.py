"""Corpus BLEU, chrF++ and round-trip translation scoring.

BLEU: clipped n-gram precisions for n = 1..4, geometric mean, brevity
penalty ``exp(1 - r/c)`` when the hypothesis corpus is shorter.  Orders
with no hypothesis n-grams at all (very short corpora) are left out of the
mean, so a corpus scored against itself always gets 100.  No smoothing by
default; ``smooth_k > 0`` adds k to matches and totals of orders 2..4.

chrF++: character n-grams 1..6 (whitespace removed) plus word n-grams 1..2.
Statistics are summed over the corpus, precision and recall are averaged
over the orders present in both hypothesis and reference, and combined as
an F-score with beta = 2.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .errors import MetricError
from .tokenizer import words

BLEU_ORDER = 4
CHAR_ORDER = 6
WORD_ORDER = 2
BETA = 2.0


@dataclass(frozen=True)
class MetricReport:
    bleu: float | None = None
    chrfpp: float | None = None
    precisions: tuple[float, ...] = ()  # BLEU n-gram precisions, percent
    brevity_penalty: float | None = None
    hyp_len: int = 0
    ref_len: int = 0
    sentences: int = 0
    perplexity: float | None = None  # filled by an external scorer, never computed here
    worst: tuple[dict, ...] = ()  # round trip: lowest sentence chrF++ first
    skipped: int = 0  # round trip: sentences lost to quarantined batches

    def lines(self) -> list[str]:
        out = [f"sentences={self.sentences}"]
        if self.bleu is not None:
            out += [
                f"bleu={self.bleu:.2f}",
                "precisions=" + "/".join(f"{p:.2f}" for p in self.precisions),
                f"brevity_penalty={self.brevity_penalty:.4f}",
                f"hyp_len={self.hyp_len}",
                f"ref_len={self.ref_len}",
            ]
        if self.chrfpp is not None:
            out.append(f"chrfpp={self.chrfpp:.2f}")
        if self.perplexity is not None:
            out.append(f"perplexity={self.perplexity:.2f}")
        if self.skipped:
            out.append(f"skipped={self.skipped}")
        return out


def _check(hyps: Sequence[str], refs: Sequence[str]) -> None:
    if len(hyps) != len(refs):
        raise MetricError(f"length mismatch: {len(hyps)} hypotheses vs {len(refs)} references")
    if not hyps:
        raise MetricError("empty corpus")


def _split(text: str, pretokenized: bool) -> list[str]:
    return text.split() if pretokenized else words(text)


def ngrams(tokens: Sequence, n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu_stats(hyp: Sequence[str], ref: Sequence[str], order: int = BLEU_ORDER) -> list[int]:
    """``[hyp_len, ref_len, match_1, total_1, ..., match_n, total_n]`` for one pair."""
    stats = [len(hyp), len(ref)]
    for n in range(1, order + 1):
        h, r = ngrams(hyp, n), ngrams(ref, n)
        stats += [sum(min(c, r[g]) for g, c in h.items()), max(len(hyp) - n + 1, 0)]
    return stats


def bleu_from_stats(stats: Sequence[float], order: int = BLEU_ORDER, smooth_k: float = 0.0) -> MetricReport:
    c, r = stats[0], stats[1]
    precisions, logs = [], []
    for n in range(order):
        match, total = stats[2 + 2 * n], stats[3 + 2 * n]
        if smooth_k and n > 0:
            match, total = match + smooth_k, total + smooth_k
        if total == 0:
            break
        p = match / total
        precisions.append(100.0 * p)
        logs.append(math.log(p) if p > 0 else -math.inf)
    if c == 0 or not logs:
        return MetricReport(0.0, None, tuple(precisions), 0.0, int(c), int(r))
    bp = 1.0 if c >= r else math.exp(1.0 - r / c)
    mean = sum(logs) / len(logs)
    score = 0.0 if mean == -math.inf else 100.0 * bp * math.exp(mean)
    return MetricReport(score, None, tuple(precisions), bp, int(c), int(r))


def bleu(
    hypotheses: Sequence[str], references: Sequence[str], pretokenized: bool = False, smooth_k: float = 0.0
) -> MetricReport:
    _check(hypotheses, references)
    totals = [0] * (2 + 2 * BLEU_ORDER)
    for h, r in zip(hypotheses, references):
        for i, v in enumerate(bleu_stats(_split(h, pretokenized), _split(r, pretokenized))):
            totals[i] += v
    return replace(bleu_from_stats(totals, smooth_k=smooth_k), sentences=len(hypotheses))


def chrf_stats(hyp: str, ref: str, pretokenized: bool = False) -> list[int]:
    """``[n_hyp, n_ref, n_match]`` per order: char orders first, then word orders."""
    hc, rc = "".join(hyp.split()), "".join(ref.split())
    hw, rw = _split(hyp, pretokenized), _split(ref, pretokenized)
    stats: list[int] = []
    seqs = [(hc, rc, n) for n in range(1, CHAR_ORDER + 1)] + [(hw, rw, n) for n in range(1, WORD_ORDER + 1)]
    for h_seq, r_seq, n in seqs:
        h, r = ngrams(h_seq, n), ngrams(r_seq, n)
        stats += [sum(h.values()), sum(r.values()), sum(min(c, r[g]) for g, c in h.items())]
    return stats


def chrf_from_stats(stats: Sequence[float], beta: float = BETA) -> float:
    precision = recall = 0.0
    effective = 0
    for i in range(0, len(stats), 3):
        n_hyp, n_ref, n_match = stats[i : i + 3]
        if n_hyp > 0 and n_ref > 0:
            precision += n_match / n_hyp
            recall += n_match / n_ref
            effective += 1
    if effective == 0:
        return 0.0
    precision /= effective
    recall /= effective
    if precision + recall == 0:
        return 0.0
    f = beta**2
    return 100.0 * (1 + f) * precision * recall / (f * precision + recall)


def chrfpp(hypotheses: Sequence[str], references: Sequence[str], pretokenized: bool = False) -> MetricReport:
    _check(hypotheses, references)
    totals = [0] * (3 * (CHAR_ORDER + WORD_ORDER))
    for h, r in zip(hypotheses, references):
        for i, v in enumerate(chrf_stats(h, r, pretokenized)):
            totals[i] += v
    return MetricReport(chrfpp=chrf_from_stats(totals), sentences=len(hypotheses))


def score(
    hypotheses: Sequence[str], references: Sequence[str], pretokenized: bool = False, smooth_k: float = 0.0
) -> MetricReport:
    """BLEU and chrF++ in one report."""
    b = bleu(hypotheses, references, pretokenized, smooth_k)
    return replace(b, chrfpp=chrfpp(hypotheses, references, pretokenized).chrfpp)


def sentence_chrfpp(hyp: str, ref: str, pretokenized: bool = False) -> float:
    return chrf_from_stats(chrf_stats(hyp, ref, pretokenized))


# ---------------------------------------------------------------------------
# round trip


@dataclass(frozen=True)
class RTTConfig:
    """``backend_a`` translates ``direction``; ``backend_b`` translates it back."""

    backend_a: object
    backend_b: object
    direction: str = "lvb-ita"
    sample_size: int | None = None
    worst: int = 10
    options: dict = field(default_factory=dict)  # passed to btx.translate_stream


def round_trip(config: RTTConfig, sentences: Iterable[str]) -> MetricReport:
    """Score B(A(x)) against x with BLEU and chrF++."""
    from .btx.pipeline import translate_stream
    from .langs import parse_direction, reverse

    direction = parse_direction(config.direction)
    originals = list(sentences)
    if config.sample_size is not None:
        originals = originals[: config.sample_size]
    if not originals:
        raise MetricError("empty corpus")
    forward = list(translate_stream(config.backend_a, originals, direction, **config.options))
    kept = [(x, y) for x, y in forward if y is not None]
    back = list(translate_stream(config.backend_b, [y for _, y in kept], reverse(direction), **config.options))
    triples = [(x, y, z) for (x, y), (_, z) in zip(kept, back) if z is not None]
    if not triples:
        raise MetricError("every sentence was quarantined")
    origs = [x for x, _, _ in triples]
    backs = [z for _, _, z in triples]
    report = score(backs, origs)
    per = sorted(
        (
            {"source": x, "forward": y, "back": z, "chrfpp": sentence_chrfpp(z, x), "index": i}
            for i, (x, y, z) in enumerate(triples)
        ),
        key=lambda d: (d["chrfpp"], d["index"]),
    )
    return replace(report, worst=tuple(per[: config.worst]), skipped=len(originals) - len(triples))


# Reference round-trip results (BLEU, chrF++) for the trained models:
# they are not reproducible here, since those models are not available.
RTT_REFERENCE_REPRODUCIBLE = False
RTT_REFERENCE = {
    ("N4", "N4"): ((70.57, 82.56), (64.19, 81.26)),
    ("N4", "R4"): ((58.57, 74.50), (47.16, 72.09)),
    ("N4", "L4"): ((63.90, 78.09), (59.47, 78.46)),
    ("R4", "N4"): ((70.80, 82.20), (68.38, 83.00)),
    ("R4", "R4"): ((80.12, 88.94), (68.51, 84.73)),
    ("R4", "L4"): ((70.36, 81.98), (67.41, 82.68)),
    ("L4", "N4"): ((63.72, 77.53), (57.02, 76.54)),
    ("L4", "R4"): ((57.13, 73.32), (46.95, 71.52)),
    ("L4", "L4"): ((72.31, 83.69), (65.74, 82.02)),
}


@dataclass(frozen=True)
class RTTRow:
    a: str
    b: str
    lvb: MetricReport  # lvb -A-> ita -B-> lvb
    ita: MetricReport  # ita -A-> lvb -B-> ita


def rtt_table(
    backends: dict, pairs: Sequence[tuple[str, str]], lvb_sentences: Sequence[str], ita_sentences: Sequence[str], **options
) -> list[RTTRow]:
    """One row per (A, B) pair, both round-trip directions."""
    rows = []
    for a, b in pairs:
        fwd = round_trip(RTTConfig(backends[a], backends[b], "lvb-ita", options=options), lvb_sentences)
        bwd = round_trip(RTTConfig(backends[a], backends[b], "ita-lvb", options=options), ita_sentences)
        rows.append(RTTRow(a, b, fwd, bwd))
    return rows


def format_rtt_table(rows: Sequence[RTTRow]) -> str:
    head = ["A/B", "lvb -A-> ita -B-> lvb (BLEU / chrF++)", "ita -A-> lvb -B-> ita (BLEU / chrF++)"]
    lines = ["\t".join(head)]
    for r in rows:
        lines.append(
            f"{r.a}/{r.b}\t{r.lvb.bleu:.2f} / {r.lvb.chrfpp:.2f}\t{r.ita.bleu:.2f} / {r.ita.chrfpp:.2f}"
        )
    return "\n".join(lines) + "\n"
