"""Slow, obviously-correct reference computations used as test oracles.

Nothing here imports from ladinmt: each function recomputes its quantity
from the textbook definition with plain loops.
"""

import math


def _grams(seq, n):
    return [tuple(seq[i : i + n]) for i in range(len(seq) - n + 1)]


def _clipped_matches(hyp_grams, ref_grams):
    matches = 0
    used = list(ref_grams)
    for g in hyp_grams:
        if g in used:
            used.remove(g)
            matches += 1
    return matches


def bleu(hyps, refs, max_order=4):
    """Corpus BLEU on whitespace tokens, orders with no hypothesis n-grams dropped."""
    c = r = 0
    matches = [0] * max_order
    totals = [0] * max_order
    for h, ref in zip(hyps, refs):
        ht, rt = h.split(), ref.split()
        c += len(ht)
        r += len(rt)
        for n in range(1, max_order + 1):
            hg, rg = _grams(ht, n), _grams(rt, n)
            matches[n - 1] += _clipped_matches(hg, rg)
            totals[n - 1] += len(hg)
    logs = []
    for m, t in zip(matches, totals):
        if t == 0:
            break
        if m == 0:
            return 0.0
        logs.append(math.log(m / t))
    if c == 0 or not logs:
        return 0.0
    bp = 1.0 if c >= r else math.exp(1 - r / c)
    return 100 * bp * math.exp(sum(logs) / len(logs))


def chrfpp(hyps, refs, char_order=6, word_order=2, beta=2.0):
    """Corpus chrF++: average P and R over orders seen on both sides, then F-beta."""
    stats = {}
    for h, ref in zip(hyps, refs):
        hc = "".join(ch for ch in h if not ch.isspace())
        rc = "".join(ch for ch in ref if not ch.isspace())
        seqs = [("c", n, list(hc), list(rc)) for n in range(1, char_order + 1)]
        seqs += [("w", n, h.split(), ref.split()) for n in range(1, word_order + 1)]
        for kind, n, hs, rs in seqs:
            hg, rg = _grams(hs, n), _grams(rs, n)
            k = (kind, n)
            a, b, m = stats.get(k, (0, 0, 0))
            stats[k] = (a + len(hg), b + len(rg), m + _clipped_matches(hg, rg))
    ps, rs_ = [], []
    for a, b, m in stats.values():
        if a and b:
            ps.append(m / a)
            rs_.append(m / b)
    if not ps:
        return 0.0
    p, rc = sum(ps) / len(ps), sum(rs_) / len(rs_)
    if p + rc == 0:
        return 0.0
    return 100 * (1 + beta**2) * p * rc / (beta**2 * p + rc)


def trigram_counts(sentence, n=3):
    """Character n-gram counts of a lowercased, whitespace-collapsed sentence."""
    s = " ".join(sentence.lower().split())
    out = {}
    for i in range(len(s) - n + 1):
        g = s[i : i + n]
        out[g] = out.get(g, 0) + 1
    return out


def recipe_counts(n_auth, n_mono_lvb, n_mono_ita, name):
    """Hand-derived record counts per origin for the standard recipes."""
    bt_both = n_mono_lvb + n_mono_ita
    table = {
        "N1": (n_auth, 0, 0),
        "N2": (n_auth, n_mono_lvb, 0),
        "N3": (n_auth, bt_both, 0),
        "N4": (n_auth, bt_both, 0),
        "N5": (n_auth, bt_both, bt_both),
        "A1": (n_auth, 3 * bt_both, 0),
        "A2": (n_auth, 3 * bt_both, 3 * bt_both),
    }
    a, b, f = table[name]
    return {"authentic": a, "back-translated": b, "forward-translated": f}
