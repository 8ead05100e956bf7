"""Sentence segmentation and spelling-reform normalization of Ladin text."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Sequence, Union

from .errors import CompileError
from .morphodict import CompiledDictionary
from .tokenizer import tokenize, untokenize

# ---------------------------------------------------------------------------
# segmentation

_FINAL = ".!?…"
_CLOSERS = "\"'»”’)]"
_OPENERS = "\"'«“„‘(¿¡"

# a run of final punctuation plus closing quotes, then whitespace
_BOUNDARY_RE = re.compile(r"([%s]+[%s]*)(\s+)" % (re.escape(_FINAL), re.escape(_CLOSERS)))
_PARAGRAPH_RE = re.compile(r"\n[ \t]*\n\s*")
_WORD_BEFORE_RE = re.compile(r"(\S+)$")


def load_abbreviations(path=None) -> frozenset[str]:
    if path is None:
        text = resources.files("ladinmt").joinpath("data/abbreviations.txt").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    items = (line.split("#", 1)[0].strip() for line in text.splitlines())
    return frozenset(a.lower() for a in items if a)


_DEFAULT_ABBREVIATIONS: frozenset[str] | None = None


def default_abbreviations() -> frozenset[str]:
    global _DEFAULT_ABBREVIATIONS
    if _DEFAULT_ABBREVIATIONS is None:
        _DEFAULT_ABBREVIATIONS = load_abbreviations()
    return _DEFAULT_ABBREVIATIONS


def _protected(head: str, punct: str, abbreviations: frozenset[str]) -> bool:
    if punct != ".":
        return False
    m = _WORD_BEFORE_RE.search(head)
    if not m:
        return False
    word = m.group(1).lstrip(_OPENERS)
    if word.isdigit():  # ordinal: "3. dezëmber"
        return True
    return (word + ".").lower() in abbreviations


def segment_with_separators(text: str, abbreviations: Iterable[str] | None = None) -> list[str]:
    """Split into ``[sep, sentence, sep, sentence, ..., sep]``.

    ``"".join(parts) == text`` always holds; the sentences are ``parts[1::2]``.
    A boundary is a run of ``. ! ? …`` (optionally followed by closing quotes
    or brackets), whitespace, then an upper-case letter or an opening quote.
    A period after a listed abbreviation or after a bare number does not end a
    sentence.  A blank line always ends one.
    """
    abbrev = default_abbreviations() if abbreviations is None else frozenset(a.lower() for a in abbreviations)
    cuts: list[tuple[int, int]] = []  # (end of sentence, start of next)
    for m in _BOUNDARY_RE.finditer(text):
        nxt = text[m.end() : m.end() + 1]
        if not nxt or not (nxt.isupper() or nxt in _OPENERS):
            continue
        punct = m.group(1).rstrip(_CLOSERS)
        if _protected(text[: m.start()], punct, abbrev):
            continue
        cuts.append((m.end(1), m.end()))
    for m in _PARAGRAPH_RE.finditer(text):
        cuts.append((m.start(), m.end()))
    cuts.sort()

    parts: list[str] = []
    pos = 0
    lead = len(text) - len(text.lstrip())
    parts.append(text[:lead])
    pos = lead
    for end, start in cuts:
        if end < pos:  # overlaps a cut already taken
            continue
        sentence = text[pos:end]
        if sentence.strip():
            body = sentence.rstrip()
            parts.append(body)
            parts.append(sentence[len(body) :] + text[end:start])
        else:
            parts[-1] += text[pos:start]
        pos = start
    rest = text[pos:]
    if rest.strip():
        body = rest.rstrip()
        parts.append(body)
        parts.append(rest[len(body) :])
    else:
        parts[-1] += rest
    return parts


def segment(text: str, abbreviations: Iterable[str] | None = None) -> list[str]:
    return segment_with_separators(text, abbreviations)[1::2]


def join_segments(parts: Sequence[str]) -> str:
    return "".join(parts)


# ---------------------------------------------------------------------------
# respelling

SCOPES = ("whole", "suffix", "prefix")


@dataclass(frozen=True)
class RespellRule:
    scope: str
    pattern: str
    replacement: str

    def __post_init__(self):
        if self.scope not in SCOPES:
            raise ValueError(f"scope must be one of {SCOPES}, got {self.scope!r}")
        if not self.pattern:
            raise ValueError("empty pattern")
        if self.pattern == self.replacement:
            raise ValueError(f"identity rule {self.pattern!r} -> {self.replacement!r}")

    def apply(self, word: str) -> str | None:
        """Rewritten word, or None when the rule does not apply."""
        if self.scope == "whole":
            return self.replacement if word == self.pattern else None
        if self.scope == "suffix":
            if word.endswith(self.pattern) and len(word) > len(self.pattern):
                return word[: -len(self.pattern)] + self.replacement
            return None
        if word.startswith(self.pattern) and len(word) > len(self.pattern):
            return self.replacement + word[len(self.pattern) :]
        return None

    def __str__(self):
        return f"{self.scope} {self.pattern} -> {self.replacement}"


def parse_respell_rules(text: str, path: str = "<respell>") -> list[RespellRule]:
    rules = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        lhs, arrow, replacement = line.partition("->")
        fields = lhs.split()
        if not arrow or len(fields) != 2 or len(replacement.split()) != 1:
            raise CompileError("expected '<scope> <pattern> -> <replacement>'", path, lineno)
        try:
            rules.append(RespellRule(fields[0], fields[1], replacement.strip()))
        except ValueError as exc:
            raise CompileError(str(exc), path, lineno) from None
    return rules


def load_respell_rules(path=None) -> list[RespellRule]:
    if path is None:
        res = resources.files("ladinmt").joinpath("data/respell.txt")
        return parse_respell_rules(res.read_text(encoding="utf-8"), "respell.txt")
    return parse_respell_rules(Path(path).read_text(encoding="utf-8"), str(path))


@dataclass(frozen=True)
class Kept:
    text: str
    respelled: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class Dropped:
    text: str
    unknown: tuple[str, ...]


Outcome = Union[Kept, Dropped]


def _respell(word: str, rules: Sequence[RespellRule], known) -> str | None:
    lower = word.lower()
    cap = word[:1].isupper() and lower != word
    for rule in rules:
        new = rule.apply(lower)
        if new is not None and known(new):
            return new[:1].upper() + new[1:] if cap else new
    return None


def normalize_sentence(d: CompiledDictionary, rules: Sequence[RespellRule], sentence: str, lang: str = "lvb") -> Outcome:
    """Respell unknown words; keep the sentence only if every word ends up known."""
    side = d.side(lang)
    tokens = tokenize(sentence)
    content = [t for t in tokens if t.kind != "space"]
    mask = side.known_mask(content)
    if all(ok or t.kind != "word" for t, ok in zip(content, mask)):
        return Kept(sentence)

    def known(w):
        return bool(side.analyze(w))

    replaced: dict[int, str] = {}
    unknown: list[str] = []
    for k, (tok, ok) in enumerate(zip(content, mask)):
        if ok or tok.kind != "word":
            continue
        new = _respell(tok.text, rules, known)
        if new is None:
            unknown.append(tok.text)
        else:
            replaced[k] = new
    if unknown:
        return Dropped(sentence, tuple(unknown))
    out, changes = [], []
    k = 0
    for tok in tokens:
        if tok.kind == "space":
            out.append(tok)
            continue
        if k in replaced:
            changes.append((tok.text, replaced[k]))
            tok = tok.__class__(replaced[k], tok.kind, tok.space, tok.elided)
        out.append(tok)
        k += 1
    return Kept(untokenize(out), tuple(changes))


@dataclass
class FilterReport:
    total: int = 0
    kept: int = 0
    dropped: int = 0
    respelled: int = 0  # tokens rewritten in kept sentences
    histogram: Counter = field(default_factory=Counter)  # unknown words per dropped sentence -> sentences

    def add(self, outcome: Outcome) -> None:
        self.total += 1
        if isinstance(outcome, Kept):
            self.kept += 1
            self.respelled += len(outcome.respelled)
        else:
            self.dropped += 1
            self.histogram[len(outcome.unknown)] += 1

    def merge(self, other: "FilterReport") -> "FilterReport":
        return FilterReport(
            self.total + other.total,
            self.kept + other.kept,
            self.dropped + other.dropped,
            self.respelled + other.respelled,
            self.histogram + other.histogram,
        )

    def lines(self) -> list[str]:
        out = [f"total={self.total}", f"kept={self.kept}", f"dropped={self.dropped}", f"respelled={self.respelled}"]
        out += [f"dropped_with_unknown[{k}]={v}" for k, v in sorted(self.histogram.items())]
        return out


def filter_corpus(
    d: CompiledDictionary, rules: Sequence[RespellRule], sentences: Iterable[str], lang: str = "lvb"
) -> tuple[Iterator[str], FilterReport]:
    """Lazily yield kept (normalized) sentences.

    The report fills in as the iterator is consumed; it is complete once the
    stream is exhausted.
    """
    report = FilterReport()

    def run():
        for s in sentences:
            outcome = normalize_sentence(d, rules, s, lang)
            report.add(outcome)
            if isinstance(outcome, Kept):
                yield outcome.text

    return run(), report
