import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from ladinmt import metrics
from ladinmt.btx.backends import FunctionBackend, IdentityBackend, RBMTBackend
from ladinmt.errors import MetricError

VOCAB = "le liber é to rü bel da ciasa ora y pa chësc bun dé".split()


def random_corpus(rng, max_sentences=10):
    """Hypotheses share words with references; references have >= 2 words and >= 6 letters."""
    n = rng.randint(1, max_sentences)
    hyps, refs = [], []
    for _ in range(n):
        ref = [rng.choice(VOCAB) for _ in range(rng.randint(2, 9))]
        while len("".join(ref)) < 6:
            ref.append(rng.choice(VOCAB))
        hyp = [w if rng.random() < 0.7 else rng.choice(VOCAB) for w in ref]
        if rng.random() < 0.3:
            hyp = hyp[: rng.randint(1, len(hyp))]
        if rng.random() < 0.3:
            hyp += [rng.choice(VOCAB) for _ in range(rng.randint(1, 3))]
        hyps.append(" ".join(hyp))
        refs.append(" ".join(ref))
    return hyps, refs


def sacre():
    sacrebleu = pytest.importorskip("sacrebleu")
    bleu = sacrebleu.metrics.BLEU(tokenize="none", smooth_method="none", effective_order=True)
    chrf = sacrebleu.metrics.CHRF(word_order=2)
    return bleu, chrf


@pytest.mark.parametrize("seed", range(20))
def test_matches_brute_force_oracle(seed):
    hyps, refs = random_corpus(random.Random(seed))
    assert metrics.bleu(hyps, refs, pretokenized=True).bleu == pytest.approx(oracles.bleu(hyps, refs), abs=1e-9)
    assert metrics.chrfpp(hyps, refs, pretokenized=True).chrfpp == pytest.approx(oracles.chrfpp(hyps, refs), abs=1e-9)


@pytest.mark.parametrize("seed", range(20))
def test_matches_reference_scorer(seed):
    bleu, chrf = sacre()
    hyps, refs = random_corpus(random.Random(1000 + seed))
    assert metrics.bleu(hyps, refs, pretokenized=True).bleu == pytest.approx(bleu.corpus_score(hyps, [refs]).score, abs=0.1)
    assert metrics.chrfpp(hyps, refs, pretokenized=True).chrfpp == pytest.approx(
        chrf.corpus_score(hyps, [refs]).score, abs=0.1
    )


@settings(max_examples=200, deadline=None)
@given(st.lists(st.lists(st.sampled_from(VOCAB), min_size=1, max_size=8).map(" ".join), min_size=1, max_size=6))
def test_identity_scores_100(sentences):
    r = metrics.score(sentences, sentences, pretokenized=True)
    assert r.bleu == pytest.approx(100.0)
    assert r.chrfpp == pytest.approx(100.0)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6))
def test_scores_are_bounded(seed):
    hyps, refs = random_corpus(random.Random(seed))
    r = metrics.score(hyps, refs, pretokenized=True)
    assert 0 <= r.bleu <= 100 + 1e-9
    assert 0 <= r.chrfpp <= 100 + 1e-9


def test_clipping_and_brevity():
    r = metrics.bleu(["the the the the"], ["the cat"], pretokenized=True)
    assert r.precisions[0] == pytest.approx(25.0)
    assert r.bleu == 0.0
    short = metrics.bleu(["a b c"], ["a b c d e f"], pretokenized=True)
    assert short.brevity_penalty == pytest.approx(2.718281828459045 ** (1 - 6 / 3))


def test_smoothing_only_touches_higher_orders():
    plain = metrics.bleu(["a b x d"], ["a b c d"], pretokenized=True)
    smooth = metrics.bleu(["a b x d"], ["a b c d"], pretokenized=True, smooth_k=1)
    assert plain.bleu == 0.0
    assert smooth.precisions[0] == plain.precisions[0]
    assert smooth.bleu > 0


def test_default_tokenizer_splits_punctuation():
    assert metrics.bleu(["chësc liber."], ["chësc liber ."], pretokenized=False).bleu == pytest.approx(100.0)
    assert metrics.bleu(["chësc liber."], ["chësc liber ."], pretokenized=True).bleu < 100


def test_errors():
    with pytest.raises(MetricError, match="length"):
        metrics.bleu(["a"], ["a", "b"])
    with pytest.raises(MetricError, match="empty"):
        metrics.chrfpp([], [])


def test_report_lines():
    lines = metrics.score(["a b c d"], ["a b c d"]).lines()
    assert "bleu=100.00" in lines and "chrfpp=100.00" in lines


# -- round trip ----------------------------------------------------------------


def test_identity_round_trip_is_perfect(mono_lvb):
    be = IdentityBackend("id")
    r = metrics.round_trip(metrics.RTTConfig(be, be), mono_lvb)
    assert r.bleu == pytest.approx(100.0) and r.chrfpp == pytest.approx(100.0)
    assert r.skipped == 0


def test_rbmt_then_identity_equals_direct_scoring(dictionary, rules, mono_lvb):
    rb = RBMTBackend("R1", dictionary, rules)
    r = metrics.round_trip(metrics.RTTConfig(rb, IdentityBackend("id")), mono_lvb)
    direct = metrics.score(rb.translate(mono_lvb, "lvb-ita"), mono_lvb)
    assert r.bleu == direct.bleu
    assert r.chrfpp == direct.chrfpp


def test_round_trip_worst_and_skipped(dictionary, rules, mono_lvb):
    rb = RBMTBackend("R1", dictionary, rules)
    r = metrics.round_trip(metrics.RTTConfig(rb, rb, worst=3, sample_size=10), mono_lvb)
    assert r.sentences == 10
    scores = [w["chrfpp"] for w in r.worst]
    assert scores == sorted(scores) and len(scores) == 3

    def flaky(s, d):
        if any("liber" in x for x in s):
            raise metrics.MetricError("never")  # not a BackendError: must propagate
        return s

    with pytest.raises(MetricError):
        metrics.round_trip(metrics.RTTConfig(FunctionBackend("f", flaky, 1), rb), mono_lvb)


def test_quarantined_sentences_are_skipped(mono_lvb):
    from ladinmt.btx.pipeline import RetryPolicy
    from ladinmt.errors import BackendError

    def fn(s, d):
        if "liber" in s[0]:
            raise BackendError("down")
        return s

    be = FunctionBackend("f", fn, 1)
    opts = {"retry": RetryPolicy(1, 0)}
    r = metrics.round_trip(metrics.RTTConfig(be, be, options=opts), mono_lvb)
    lost = sum("liber" in s for s in mono_lvb)
    assert r.skipped == lost and r.sentences == len(mono_lvb) - lost


def test_table_shape(dictionary, rules, mono_lvb, mono_ita):
    rb = RBMTBackend("R1", dictionary, rules)
    backends = {k: rb for k in ("N4", "R4", "L4")}
    rows = metrics.rtt_table(backends, list(metrics.RTT_REFERENCE), mono_lvb, mono_ita)
    assert [(r.a, r.b) for r in rows] == list(metrics.RTT_REFERENCE)
    text = metrics.format_rtt_table(rows)
    assert len(text.splitlines()) == 10
    assert metrics.RTT_REFERENCE[("R4", "R4")][0] == (80.12, 88.94)
