"""Corpus records with provenance, and their TSV / JSONL file formats.

TSV: ``src<TAB>tgt`` per line; direction, origin and generator come from
the caller.  JSONL: one object per line with keys ``src``, ``tgt``,
``direction``, ``origin``, ``generator``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Iterator

from ..errors import ConfigError
from ..langs import parse_direction, reverse

AUTHENTIC = "authentic"
BACK_TRANSLATED = "back-translated"
FORWARD_TRANSLATED = "forward-translated"
ORIGINS = (AUTHENTIC, BACK_TRANSLATED, FORWARD_TRANSLATED)
HUMAN = "human"


@dataclass(frozen=True)
class CorpusRecord:
    src: str
    tgt: str
    direction: str
    origin: str = AUTHENTIC
    generator: str = HUMAN

    def __post_init__(self):
        object.__setattr__(self, "direction", parse_direction(self.direction))
        if self.origin not in ORIGINS:
            raise ValueError(f"origin must be one of {ORIGINS}, got {self.origin!r}")
        if (self.origin == AUTHENTIC) != (self.generator == HUMAN):
            raise ValueError("authentic records (and only those) have generator 'human'")

    def flipped(self) -> "CorpusRecord":
        """The same pair read the other way; back- and forward-translation swap."""
        origin = {AUTHENTIC: AUTHENTIC, BACK_TRANSLATED: FORWARD_TRANSLATED, FORWARD_TRANSLATED: BACK_TRANSLATED}
        return CorpusRecord(self.tgt, self.src, reverse(self.direction), origin[self.origin], self.generator)

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "CorpusRecord":
        obj = json.loads(line)
        return cls(obj["src"], obj["tgt"], obj["direction"], obj["origin"], obj["generator"])


def _lines(path) -> Iterator[tuple[int, str]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            if line.strip():
                yield lineno, line


def read_monolingual(path) -> list[str]:
    return [line.strip() for _, line in _lines(path)]


def read_tsv(path, direction: str = "lvb-ita", origin: str = AUTHENTIC, generator: str = HUMAN) -> list[CorpusRecord]:
    out = []
    for lineno, line in _lines(path):
        parts = line.split("\t")
        if len(parts) != 2:
            raise ConfigError(f"{path}:{lineno}: expected 'src<TAB>tgt', got {len(parts)} fields")
        out.append(CorpusRecord(parts[0].strip(), parts[1].strip(), direction, origin, generator))
    return out


def read_jsonl(path) -> list[CorpusRecord]:
    out = []
    for lineno, line in _lines(path):
        try:
            out.append(CorpusRecord.from_json(line))
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"{path}:{lineno}: bad record: {exc}") from None
    return out


def read_records(path, direction: str = "lvb-ita") -> list[CorpusRecord]:
    """JSONL when the suffix is ``.jsonl``, otherwise authentic TSV."""
    if Path(path).suffix == ".jsonl":
        return read_jsonl(path)
    return read_tsv(path, direction)


def write_jsonl(records: Iterable[CorpusRecord], path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(r.to_json() + "\n")
            n += 1
    return n


def write_tsv(records: Iterable[CorpusRecord], path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(f"{r.src}\t{r.tgt}\n")
            n += 1
    return n
