"""Shallow-transfer translation: tokenize, analyze, disambiguate, transfer, generate.

Failure markers in the output:

* ``*word``  the source token has no analysis (unknown word)
* ``@lemma`` the source lemma has no bilingual entry
* ``#lemma`` the target generator has no form with the requested tags
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Sequence

from .langs import split_direction
from .morphodict import Analysis, BilingualEntry, CompiledDictionary, LexicalUnit, Monodix
from .rules import Delete, ReplaceLemma, Reorder, SetTag, TransferRule
from .tokenizer import Token, detokenize, tokenize

__all__ = [
    "TargetUnit",
    "TranslationResult",
    "tokenize",
    "analyze_tokens",
    "disambiguate",
    "lexical_transfer",
    "apply_rules",
    "generate_units",
    "translate",
]


@dataclass
class TargetUnit:
    lemma: str
    category: str
    tags: tuple[str, ...]
    source: LexicalUnit
    index: int  # position of the source unit in the sentence
    marker: str = ""  # "", "*" unknown, "@" no bilingual entry
    entry: BilingualEntry | None = None
    fired: list[str] = field(default_factory=list)

    @property
    def kind(self) -> str:
        return self.source.kind

    @property
    def surface(self) -> str:
        return self.source.surface

    @property
    def source_analysis(self) -> Analysis | None:
        if self.source.kind in ("punct", "number"):
            return Analysis(self.source.surface, self.source.kind, ())
        return self.source.analysis


@dataclass(frozen=True)
class TranslationResult:
    target_text: str
    trace: tuple[dict, ...]
    unknown_count: int


def analyze_tokens(side: Monodix, tokens: Sequence[Token]) -> list[LexicalUnit]:
    """Group tokens into lexical units (longest multiword first) and analyze them."""
    toks = [t for t in tokens if t.kind != "space"]
    units: list[LexicalUnit] = []
    i = 0
    while i < len(toks):
        tok = toks[i]
        if tok.kind != "word":
            units.append(LexicalUnit(tok.text, [], kind=tok.kind))
            i += 1
            continue
        length = side.match_multiword(toks, i)
        if length:
            window = toks[i : i + length]
            surface = "".join(t.text + t.space for t in window[:-1]) + window[-1].text
            key = side.multiwords[tuple(t.text.lower() for t in window)]
            analyses = side.analyze(surface) or [
                a.__class__(a.lemma, a.category, a.tags, folded=True) for a in side.analyzer[key]
            ]
            units.append(LexicalUnit(surface, analyses, elided=window[-1].elided, span=length))
            i += length
            continue
        units.append(LexicalUnit(tok.text, side.analyze(tok.text), elided=tok.elided))
        i += 1
    return units


def disambiguate(units: Sequence[LexicalUnit]) -> list[LexicalUnit]:
    """Pick the first analysis of every analyzed unit; unknown units stay unknown."""
    out = []
    for u in units:
        u = copy.copy(u)
        u.chosen = 0 if u.analyses else None
        out.append(u)
    return out


def lexical_transfer(d: CompiledDictionary, unit: LexicalUnit, direction: str = "lvb-ita", index: int = 0) -> TargetUnit:
    if unit.kind in ("punct", "number"):
        return TargetUnit(unit.surface, unit.kind, (), unit, index)
    a = unit.analysis
    if a is None:
        return TargetUnit(unit.surface, "", (), unit, index, marker="*")
    candidates = d.candidates(direction, a.lemma, a.category)
    if not candidates:
        return TargetUnit(a.lemma, a.category, a.tags, unit, index, marker="@")
    entry = candidates[0]
    return TargetUnit(entry.tgt_lemma, entry.tgt_category, entry.apply_overrides(a.tags), unit, index, entry=entry)


def _match_length(rule: TransferRule, units: Sequence[TargetUnit], i: int) -> int:
    n = len(rule.pattern)
    if i + n > len(units):
        return 0
    return n if all(m.matches(u) for m, u in zip(rule.pattern, units[i : i + n])) else 0


def _apply(rule: TransferRule, span: Sequence[TargetUnit]) -> list[TargetUnit]:
    work = [copy.copy(u) for u in span]
    for u in work:
        u.fired = u.fired + [rule.id]
    deleted: set[int] = set()
    order = list(range(len(work)))
    for act in rule.actions:
        if isinstance(act, Delete):
            deleted.add(act.index)
        elif isinstance(act, ReplaceLemma):
            work[act.index].lemma = act.lemma
        elif isinstance(act, Reorder):
            order = [order[k] for k in act.order]
        elif isinstance(act, SetTag):
            if act.source is not None:
                new = next((t for t in work[act.source].tags if t in act.group), None)
            else:
                new = act.value
            if new is None:
                continue
            unit = work[act.index]
            kept = [t for t in unit.tags if t not in act.group]
            pos = next((k for k, t in enumerate(unit.tags) if t in act.group), len(kept))
            kept.insert(min(pos, len(kept)), new)
            unit.tags = tuple(kept)
    return [work[k] for k in order if k not in deleted]


def apply_rules(rules: Sequence[TransferRule], units: Sequence[TargetUnit], log: list | None = None) -> list[TargetUnit]:
    """Left to right, longest pattern first; on equal length the earlier rule wins.

    Matched spans never overlap; units outside any match pass through.
    ``log`` (if given) receives ``(rule_id, [source indices])`` per firing.
    """
    out: list[TargetUnit] = []
    i = 0
    while i < len(units):
        best, best_len = None, 0
        for rule in rules:
            n = _match_length(rule, units, i)
            if n > best_len:
                best, best_len = rule, n
        if best is None:
            out.append(units[i])
            i += 1
            continue
        span = units[i : i + best_len]
        if log is not None:
            log.append((best.id, [u.index for u in span]))
        out.extend(_apply(best, span))
        i += best_len
    return out


def _capitalize(text: str) -> str:
    for k, ch in enumerate(text):
        if ch.isalpha():
            return text[:k] + ch.upper() + text[k + 1 :]
    return text


def _is_capitalized(text: str) -> bool:
    first = next((ch for ch in text if ch.isalpha()), "")
    return first.isupper()


def generate_units(side: Monodix, units: Sequence[TargetUnit]) -> list[tuple[str, bool]]:
    """Surface strings plus an ``elided`` flag for detokenization."""
    out = []
    for u in units:
        if u.kind in ("punct", "number"):
            out.append((u.surface, False))
            continue
        if u.marker == "*":
            out.append(("*" + u.surface, u.source.elided))
            continue
        if u.marker == "@":
            out.append(("@" + u.lemma, False))
            continue
        text = side.generate(u.lemma, u.category, u.tags)
        a = u.source.analysis
        if a is not None and a.folded and _is_capitalized(u.surface):
            text = _capitalize(text)
        elided = "eli" in u.tags or text.endswith(("'", "’")) and u.source.elided
        out.append((text, elided))
    return out


def translate(
    d: CompiledDictionary,
    rules: Sequence[TransferRule],
    text: str,
    direction: str = "lvb-ita",
) -> TranslationResult:
    src_lang, tgt_lang = split_direction(direction)
    direction = f"{src_lang}-{tgt_lang}"
    units = disambiguate(analyze_tokens(d.side(src_lang), tokenize(text)))
    targets = [lexical_transfer(d, u, direction, i) for i, u in enumerate(units)]
    log: list = []
    transferred = apply_rules(rules, targets, log)
    pieces = generate_units(d.side(tgt_lang), transferred)

    # a sentence-initial capital survives even when the first unit was deleted
    words = [u for u in units if u.kind == "word"]
    if words and _is_capitalized(words[0].surface) and pieces:
        k = next((k for k, u in enumerate(transferred) if u.kind == "word" and not u.marker), None)
        if k is not None and k == next((j for j, u in enumerate(transferred) if u.kind == "word"), None):
            pieces[k] = (_capitalize(pieces[k][0]), pieces[k][1])

    fired: dict[int, list[str]] = {}
    for rid, idxs in log:
        for i in idxs:
            fired.setdefault(i, []).append(rid)
    survived = {u.index: s for u, (s, _) in zip(transferred, pieces)}
    trace = []
    for i, (u, t) in enumerate(zip(units, targets)):
        entry = t.entry
        trace.append(
            {
                "index": i,
                "source": u.surface,
                "kind": u.kind,
                "analysis": str(u.analysis) if u.analysis else None,
                "candidates": len(u.analyses),
                "bilingual": None
                if entry is None
                else f"{entry.src_lemma}<{entry.src_category}> -> {entry.tgt_lemma}<{entry.tgt_category}> #{entry.rank}",
                "marker": t.marker,
                "rules": fired.get(i, []),
                "target": survived.get(i),
            }
        )
    unknown = sum(1 for u in units if u.kind == "word" and not u.analyses)
    return TranslationResult(detokenize(pieces), tuple(trace), unknown)
