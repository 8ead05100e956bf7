"""Paradigm-based morphological dictionaries.

Three line-oriented source files are compiled into an immutable
:class:`CompiledDictionary` holding, per language, an analyzer (surface form
to analyses) and a generator ((lemma, category) to inflected forms), plus a
ranked bilingual index for both translation directions.

Source formats (``#`` starts a comment, blank lines are ignored)::

    # paradigms.txt
    @lang lvb
    P n-m/-i noun
    F - m,sg            # "-" is the empty suffix / the empty tag list
    F i m,pl

    # lemmas.txt
    @lang lvb
    L liber liber n-m/-i
    L á_prescia á_prescia phr   # "_" joins the words of a multiword lemma

    # bilingual.txt
    @pair lvb ita
    B liber noun libro noun
    B sal noun sale noun f>m    # tag overrides: a>b rewrite, +t add, -t drop

Analysis lists and bilingual candidates keep source-file order; the
translation pipeline always takes the first one.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import CompileError, EmptyCorpusError
from .langs import LANGS
from .tokenizer import Token, tokenize

logger = logging.getLogger(__name__)

CATEGORIES = (
    "noun",
    "adjective",
    "adverb",
    "pronoun",
    "verb",
    "determiner",
    "preposition",
    "propernoun",
    "phrase",
)
MULTIWORD_JOINER = "_"
DUMP_HEADER = "ladinmt-dict 1"


# ---------------------------------------------------------------------------
# tag inventory


@dataclass(frozen=True)
class TagInventory:
    version: str
    groups: Mapping[str, tuple[str, ...]]

    @property
    def tags(self) -> frozenset[str]:
        return frozenset(t for ts in self.groups.values() for t in ts)

    def attribute_of(self, tag: str) -> str | None:
        for attr, ts in self.groups.items():
            if tag in ts:
                return attr
        return None

    @classmethod
    def parse(cls, text: str, path: str = "<tags>") -> "TagInventory":
        version = None
        groups: dict[str, tuple[str, ...]] = {}
        seen: set[str] = set()
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("@version"):
                version = line.split()[1]
                continue
            name, sep, rest = line.partition(":")
            if not sep or not rest.split():
                raise CompileError("expected '<attribute>: <tags...>'", path, lineno)
            values = tuple(rest.split())
            dup = seen.intersection(values)
            if dup:
                raise CompileError(f"tag {sorted(dup)[0]!r} listed twice", path, lineno)
            seen.update(values)
            groups[name.strip()] = values
        if version is None:
            raise CompileError("missing @version line", path)
        return cls(version, MappingProxyType(groups))


def default_tags() -> TagInventory:
    text = resources.files("ladinmt").joinpath("data/tags.txt").read_text("utf-8")
    return TagInventory.parse(text, "tags.txt")


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class Analysis:
    lemma: str
    category: str
    tags: tuple[str, ...]
    # set when the analysis was found only after lowercasing the token
    folded: bool = field(default=False, compare=False)

    def __str__(self):
        return f"{self.lemma}<{self.category}>" + "".join(f"<{t}>" for t in self.tags)


@dataclass(frozen=True)
class Paradigm:
    id: str
    category: str
    forms: tuple[tuple[str, tuple[str, ...]], ...]


@dataclass(frozen=True)
class LemmaEntry:
    lemma: str
    stem: str
    paradigm_id: str

    @property
    def multiword(self) -> bool:
        return MULTIWORD_JOINER in self.lemma


@dataclass(frozen=True)
class BilingualEntry:
    src_lemma: str
    src_category: str
    tgt_lemma: str
    tgt_category: str
    tag_overrides: tuple[str, ...] = ()
    rank: int = 0

    def apply_overrides(self, tags: Sequence[str]) -> tuple[str, ...]:
        out = list(tags)
        for op in self.tag_overrides:
            if op.startswith("+"):
                if op[1:] not in out:
                    out.append(op[1:])
            elif op.startswith("-"):
                out = [t for t in out if t != op[1:]]
            else:
                old, new = op.split(">")
                out = [new if t == old else t for t in out]
        return tuple(out)

    def reversed(self) -> "BilingualEntry":
        # "-t" has no inverse: the generator's superset match does not need the tag back
        ops = []
        for op in self.tag_overrides:
            if op.startswith("+"):
                ops.append("-" + op[1:])
            elif ">" in op:
                old, new = op.split(">")
                ops.append(f"{new}>{old}")
        return BilingualEntry(
            self.tgt_lemma, self.tgt_category, self.src_lemma, self.src_category, tuple(ops), self.rank
        )


@dataclass
class LexicalUnit:
    surface: str
    analyses: list[Analysis]
    chosen: int | None = None  # None means unknown / not yet disambiguated
    kind: str = "word"
    elided: bool = False
    span: int = 1  # number of source tokens covered (multiwords > 1)

    @property
    def known(self) -> bool:
        return bool(self.analyses)

    @property
    def analysis(self) -> Analysis | None:
        return None if self.chosen is None else self.analyses[self.chosen]


@dataclass(frozen=True)
class CompileReport:
    lemmas: Mapping[str, int]
    forms: Mapping[str, int]
    paradigms: Mapping[str, int]
    bilingual: int
    warnings: tuple[str, ...] = ()

    def lines(self) -> list[str]:
        out = []
        for lang in self.lemmas:
            out.append(
                f"lang={lang} paradigms={self.paradigms[lang]} "
                f"lemmas={self.lemmas[lang]} forms={self.forms[lang]}"
            )
        out.append(f"bilingual={self.bilingual} warnings={len(self.warnings)}")
        return out


@dataclass(frozen=True)
class CoverageReport:
    tokens: int
    known: int
    fraction: float
    unknown_types: tuple[tuple[str, int], ...]


# ---------------------------------------------------------------------------
# one language side


@dataclass(frozen=True)
class Monodix:
    """Analyzer and generator for one language."""

    lang: str
    entries: tuple[tuple[str, Analysis], ...]  # (surface, analysis) in expansion order
    analyzer: Mapping[str, tuple[Analysis, ...]]
    generator: Mapping[tuple[str, str], tuple[tuple[tuple[str, ...], str], ...]]
    multiwords: Mapping[tuple[str, ...], str]
    max_multiword: int

    @classmethod
    def from_entries(cls, lang: str, entries: Iterable[tuple[str, Analysis]]) -> "Monodix":
        entries = tuple(entries)
        analyzer: dict[str, list[Analysis]] = {}
        generator: dict[tuple[str, str], list] = {}
        multiwords: dict[tuple[str, ...], str] = {}
        for surface, a in entries:
            analyzer.setdefault(surface, []).append(a)
            generator.setdefault((a.lemma, a.category), []).append((a.tags, surface))
            key = tuple(t.text.lower() for t in tokenize(surface) if t.kind != "space")
            if len(key) > 1:
                multiwords.setdefault(key, surface)
        return cls(
            lang,
            entries,
            MappingProxyType({k: tuple(v) for k, v in analyzer.items()}),
            MappingProxyType({k: tuple(v) for k, v in generator.items()}),
            MappingProxyType(multiwords),
            max((len(k) for k in multiwords), default=1),
        )

    def analyze(self, token: str) -> list[Analysis]:
        found = self.analyzer.get(token)
        if found:
            return list(found)
        lower = token.lower()
        if lower != token and lower in self.analyzer:
            return [replace(a, folded=True) for a in self.analyzer[lower]]
        return []

    def generate(self, lemma: str, category: str, tags: Sequence[str] = ()) -> str:
        want = set(tags)
        for form_tags, surface in self.generator.get((lemma, category), ()):
            if want.issubset(form_tags):
                return surface
        return "#" + lemma

    def match_multiword(self, tokens: Sequence[Token], i: int) -> int:
        """Length (>1) of the longest multiword starting at ``tokens[i]``, else 0."""
        for length in range(min(self.max_multiword, len(tokens) - i), 1, -1):
            window = tokens[i : i + length]
            if all(t.kind == "word" for t in window) and tuple(
                t.text.lower() for t in window
            ) in self.multiwords:
                return length
        return 0

    def known_mask(self, tokens: Sequence[Token]) -> list[bool]:
        """Per token: has an analysis, or sits inside some multiword match."""
        mask = [bool(self.analyze(t.text)) for t in tokens]
        for i in range(len(tokens)):
            length = self.match_multiword(tokens, i)
            for j in range(i, i + length):
                mask[j] = True
        return mask


# ---------------------------------------------------------------------------
# compiled pair


@dataclass(frozen=True)
class CompiledDictionary:
    pair: tuple[str, str]
    sides: Mapping[str, Monodix]
    bilingual: Mapping[str, Mapping[tuple[str, str], tuple[BilingualEntry, ...]]]
    report: CompileReport

    def side(self, lang: str) -> Monodix:
        try:
            return self.sides[lang]
        except KeyError:
            raise KeyError(f"dictionary has no {lang!r} side (has {', '.join(self.sides)})") from None

    def candidates(self, direction: str, lemma: str, category: str) -> tuple[BilingualEntry, ...]:
        return self.bilingual.get(direction, {}).get((lemma, category), ())

    def dumps(self) -> str:
        """Canonical text dump; identical sources give identical bytes."""
        lines = [DUMP_HEADER, f"pair {self.pair[0]} {self.pair[1]}"]
        r = self.report
        for lang, side in self.sides.items():
            lines.append(f"C {lang} {r.paradigms[lang]} {r.lemmas[lang]}")
            for surface, a in side.entries:
                lines.append("\t".join(["E", lang, surface, a.lemma, a.category, ",".join(a.tags)]))
        for e in self.bilingual[f"{self.pair[0]}-{self.pair[1]}"].values():
            for b in e:
                lines.append(
                    "\t".join(
                        ["B", str(b.rank), b.src_lemma, b.src_category, b.tgt_lemma,
                         b.tgt_category, ",".join(b.tag_overrides)]
                    )
                )
        for w in r.warnings:
            lines.append("W\t" + w)
        return "\n".join(lines) + "\n"


def loads_dictionary(text: str) -> CompiledDictionary:
    """Rebuild a dictionary from :meth:`CompiledDictionary.dumps` output."""
    lines = text.splitlines()
    if not lines or lines[0] != DUMP_HEADER:
        raise CompileError(f"not a dictionary dump (expected header {DUMP_HEADER!r})")
    pair = tuple(lines[1].split()[1:3])
    entries: dict[str, list] = {}
    counts: dict[str, tuple[int, int]] = {}
    bil: list[BilingualEntry] = []
    warnings = []
    for lineno, line in enumerate(lines[2:], 3):
        parts = line.split("\t") if "\t" in line else line.split()
        if parts[0] == "C":
            counts[parts[1]] = (int(parts[2]), int(parts[3]))
            entries.setdefault(parts[1], [])
        elif parts[0] == "E":
            _, lang, surface, lemma, cat, tags = parts
            entries[lang].append((surface, Analysis(lemma, cat, tuple(t for t in tags.split(",") if t))))
        elif parts[0] == "B":
            _, rank, s, sc, t, tc, ov = parts
            bil.append(BilingualEntry(s, sc, t, tc, tuple(o for o in ov.split(",") if o), int(rank)))
        elif parts[0] == "W":
            warnings.append(parts[1])
        else:
            raise CompileError("unknown record", "<dump>", lineno)
    sides = {lang: Monodix.from_entries(lang, es) for lang, es in entries.items()}
    report = CompileReport(
        lemmas=MappingProxyType({k: v[1] for k, v in counts.items()}),
        forms=MappingProxyType({k: len(v) for k, v in entries.items()}),
        paradigms=MappingProxyType({k: v[0] for k, v in counts.items()}),
        bilingual=len(bil),
        warnings=tuple(warnings),
    )
    return CompiledDictionary(pair, MappingProxyType(sides), _bilingual_index(pair, bil), report)


# ---------------------------------------------------------------------------
# parsing


def _lines(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CompileError(f"cannot read: {exc.strerror}", str(path)) from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _parse_tags(field_, inventory, path, lineno) -> tuple[str, ...]:
    if field_ == "-":
        return ()
    tags = tuple(field_.split(","))
    for t in tags:
        if t not in inventory.tags:
            raise CompileError(f"unknown tag {t!r}", path, lineno)
    return tags


def _check_category(cat, path, lineno):
    if cat not in CATEGORIES:
        raise CompileError(f"unknown category {cat!r}", path, lineno)


def _check_lang(lang, path, lineno):
    if lang not in LANGS:
        raise CompileError(f"unknown language {lang!r}", path, lineno)


def parse_paradigms(path, inventory: TagInventory) -> dict[str, dict[str, Paradigm]]:
    path = str(path)
    tables: dict[str, dict[str, Paradigm]] = {}
    lang = LANGS[0]
    current = None  # (lang, id, category, forms, lineno)

    def close():
        if current is None:
            return
        clang, pid, cat, forms, pline = current
        if not forms:
            raise CompileError(f"paradigm {pid!r} has no forms", path, pline)
        tables.setdefault(clang, {})[pid] = Paradigm(pid, cat, tuple(forms))

    for lineno, parts in _lines(path):
        head = parts[0]
        if head == "@lang" and len(parts) == 2:
            close()
            current = None
            lang = parts[1]
            _check_lang(lang, path, lineno)
        elif head == "P" and len(parts) == 3:
            close()
            pid, cat = parts[1], parts[2]
            _check_category(cat, path, lineno)
            if pid in tables.get(lang, {}) or (current and current[1] == pid and current[0] == lang):
                raise CompileError(f"duplicate paradigm id {pid!r}", path, lineno)
            current = (lang, pid, cat, [], lineno)
        elif head == "F" and len(parts) == 3:
            if current is None:
                raise CompileError("form line outside a paradigm", path, lineno)
            suffix = "" if parts[1] == "-" else parts[1]
            form = (suffix, _parse_tags(parts[2], inventory, path, lineno))
            if form in current[3]:
                raise CompileError(f"duplicate form {parts[1]} {parts[2]}", path, lineno)
            current[3].append(form)
        else:
            raise CompileError(f"malformed line: {' '.join(parts)!r}", path, lineno)
    close()
    return tables


def parse_lemmas(path) -> dict[str, list[tuple[int, LemmaEntry]]]:
    path = str(path)
    out: dict[str, list[tuple[int, LemmaEntry]]] = {}
    lang = LANGS[0]
    for lineno, parts in _lines(path):
        if parts[0] == "@lang" and len(parts) == 2:
            lang = parts[1]
            _check_lang(lang, path, lineno)
        elif parts[0] == "L" and len(parts) == 4:
            stem = "" if parts[2] == "-" else parts[2]
            out.setdefault(lang, []).append((lineno, LemmaEntry(parts[1], stem, parts[3])))
        else:
            raise CompileError(f"malformed line: {' '.join(parts)!r}", path, lineno)
    return out


def parse_bilingual(path, inventory: TagInventory) -> tuple[tuple[str, str], list[BilingualEntry]]:
    path = str(path)
    pair = (LANGS[0], LANGS[1])
    entries = []
    for lineno, parts in _lines(path):
        if parts[0] == "@pair" and len(parts) == 3:
            for lang in parts[1:]:
                _check_lang(lang, path, lineno)
            pair = (parts[1], parts[2])
        elif parts[0] == "B" and len(parts) in (5, 6):
            _check_category(parts[2], path, lineno)
            _check_category(parts[4], path, lineno)
            overrides: tuple[str, ...] = ()
            if len(parts) == 6:
                overrides = tuple(parts[5].split(","))
                for op in overrides:
                    if op[:1] in "+-":
                        names = [op[1:]]
                    elif op.count(">") == 1:
                        names = op.split(">")
                    else:
                        raise CompileError(f"bad tag override {op!r}", path, lineno)
                    for t in names:
                        if t not in inventory.tags:
                            raise CompileError(f"unknown tag {t!r}", path, lineno)
            entries.append(
                BilingualEntry(parts[1], parts[2], parts[3], parts[4], overrides, len(entries))
            )
        else:
            raise CompileError(f"malformed line: {' '.join(parts)!r}", path, lineno)
    return pair, entries


def _bilingual_index(pair, entries: Sequence[BilingualEntry]):
    fwd: dict[tuple[str, str], list[BilingualEntry]] = {}
    bwd: dict[tuple[str, str], list[BilingualEntry]] = {}
    for e in sorted(entries, key=lambda e: e.rank):
        fwd.setdefault((e.src_lemma, e.src_category), []).append(e)
        r = e.reversed()
        bwd.setdefault((r.src_lemma, r.src_category), []).append(r)
    return MappingProxyType(
        {
            f"{pair[0]}-{pair[1]}": MappingProxyType({k: tuple(v) for k, v in fwd.items()}),
            f"{pair[1]}-{pair[0]}": MappingProxyType({k: tuple(v) for k, v in bwd.items()}),
        }
    )


def _shadowed(paradigm: Paradigm) -> list[int]:
    """Indices of forms the generator can never reach (an earlier form's tags cover them)."""
    out = []
    for i, (_, tags) in enumerate(paradigm.forms):
        if any(set(tags).issubset(prev) for _, prev in paradigm.forms[:i]):
            out.append(i)
    return out


def compile_dictionary(
    paradigm_file, lemma_file, bilingual_file, inventory: TagInventory | None = None
) -> CompiledDictionary:
    """Compile the three source files into an immutable :class:`CompiledDictionary`."""
    inventory = inventory or default_tags()
    paradigms = parse_paradigms(paradigm_file, inventory)
    lemmas = parse_lemmas(lemma_file)
    pair, bil = parse_bilingual(bilingual_file, inventory)
    if not any(lemmas.values()):
        raise CompileError("empty dictionary", str(lemma_file))

    warnings: list[str] = []
    for lang, table in paradigms.items():
        for p in table.values():
            for i in _shadowed(p):
                warnings.append(f"{lang}: paradigm {p.id}: form {i} is shadowed for generation")

    sides = {}
    counts_lemmas, counts_forms, counts_pars = {}, {}, {}
    langs = [l for l in pair if l in lemmas or l in paradigms]
    langs += sorted((set(lemmas) | set(paradigms)) - set(langs))
    for lang in langs:
        table = paradigms.get(lang, {})
        expanded = []
        for lineno, entry in lemmas.get(lang, []):
            p = table.get(entry.paradigm_id)
            if p is None:
                raise CompileError(f"unresolved paradigm id {entry.paradigm_id!r}", str(lemma_file), lineno)
            surfaces = []
            for suffix, tags in p.forms:
                surface = (entry.stem + suffix).replace(MULTIWORD_JOINER, " ")
                surfaces.append(surface)
                expanded.append((surface, Analysis(entry.lemma, p.category, tags)))
            if entry.lemma.replace(MULTIWORD_JOINER, " ") not in surfaces:
                warnings.append(
                    f"{lang}: lemma {entry.lemma!r}: no form of {p.id} reproduces the citation form"
                )
        sides[lang] = Monodix.from_entries(lang, expanded)
        counts_lemmas[lang] = len(lemmas.get(lang, []))
        counts_forms[lang] = len(expanded)
        counts_pars[lang] = len(table)

    for e in bil:
        for lang, lemma, cat in ((pair[0], e.src_lemma, e.src_category), (pair[1], e.tgt_lemma, e.tgt_category)):
            side = sides.get(lang)
            if side is not None and (lemma, cat) not in side.generator:
                warnings.append(f"bilingual rank {e.rank}: {lang} lemma {lemma}<{cat}> not in monolingual dictionary")

    for w in warnings:
        logger.warning(w)
    report = CompileReport(
        MappingProxyType(counts_lemmas),
        MappingProxyType(counts_forms),
        MappingProxyType(counts_pars),
        len(bil),
        tuple(warnings),
    )
    return CompiledDictionary(pair, MappingProxyType(sides), _bilingual_index(pair, bil), report)


SOURCE_FILES = ("paradigms.txt", "lemmas.txt", "bilingual.txt")


def load_dictionary(path) -> CompiledDictionary:
    """Load a dictionary directory (the three source files) or a dump file."""
    path = Path(path)
    if path.is_dir():
        return compile_dictionary(*(path / name for name in SOURCE_FILES))
    return loads_dictionary(path.read_text(encoding="utf-8"))


def default_dictionary_dir():
    return resources.files("ladinmt").joinpath("data/lld-ita")


# ---------------------------------------------------------------------------
# module-level operations


def analyze(d: CompiledDictionary, token: str, lang: str = "lvb") -> list[Analysis]:
    return d.side(lang).analyze(token)


def generate(d: CompiledDictionary, lemma: str, category: str, tags: Sequence[str] = (), lang: str = "lvb") -> str:
    return d.side(lang).generate(lemma, category, tags)


def coverage(d: CompiledDictionary, corpus: Iterable[str], lang: str = "lvb") -> CoverageReport:
    """Share of alphabetic tokens with at least one analysis.

    Punctuation and numbers are left out of the denominator.
    """
    side = d.side(lang)
    total = known = 0
    unknown: Counter[str] = Counter()
    for sentence in corpus:
        toks = [t for t in tokenize(sentence) if t.kind != "space"]
        mask = side.known_mask(toks)
        for tok, ok in zip(toks, mask):
            if tok.kind != "word":
                continue
            total += 1
            if ok:
                known += 1
            else:
                unknown[tok.text] += 1
    if total == 0:
        raise EmptyCorpusError("empty corpus")
    ranked = tuple(sorted(unknown.items(), key=lambda kv: (-kv[1], kv[0])))
    return CoverageReport(total, known, known / total, ranked)
