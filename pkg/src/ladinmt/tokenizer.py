"""Lossless word/punctuation tokenizer for Ladin and Italian text.

Letters (including ë ö ü á é ...) form words.  A letter run absorbs one
immediately following apostrophe, so ``val'`` and ``pü'`` stay whole while
``l'identité`` splits into the elided article ``l'`` and ``identité``.
Every token carries the whitespace that follows it, which makes
``"".join(t.text + t.space for t in tokens)`` reproduce the input exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

APOSTROPHES = "'’"

_TOKEN_RE = re.compile(
    r"""
    (?P<word>(?:[^\W\d_]|[\u0300-\u036f])+[%s]?)
  | (?P<number>\d+(?:[.,]\d+)*)
  | (?P<ellipsis>\.{2,})
  | (?P<punct>[^\s])
    """
    % APOSTROPHES,
    re.VERBOSE,
)
_SPACE_RE = re.compile(r"\s+")

CLOSING = set(",.;:!?…)]}»”%") | {"..."}
OPENING = set("([{«“„‘¿¡")


@dataclass(frozen=True)
class Token:
    text: str
    kind: str  # word | number | punct | space
    space: str = ""
    elided: bool = False

    @property
    def is_word(self) -> bool:
        return self.kind == "word"


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into tokens; leading whitespace becomes a ``space`` token."""
    tokens: list[Token] = []
    pos = 0
    n = len(text)
    m = _SPACE_RE.match(text, 0)
    if m:
        tokens.append(Token("", "space", m.group()))
        pos = m.end()
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        kind = m.lastgroup
        value = m.group()
        pos = m.end()
        elided = False
        if kind == "word" and value[-1] in APOSTROPHES:
            elided = pos < n and (text[pos].isalpha())
        elif kind == "ellipsis":
            kind = "punct"
        ws = _SPACE_RE.match(text, pos)
        space = ""
        if ws:
            space = ws.group()
            pos = ws.end()
        tokens.append(Token(value, kind, space, elided))
    return tokens


def words(text: str) -> list[str]:
    return [t.text for t in tokenize(text) if t.kind != "space"]


def untokenize(tokens: Iterable[Token]) -> str:
    """Exact inverse of :func:`tokenize`."""
    return "".join(t.text + t.space for t in tokens)


def detokenize(pieces: Sequence[tuple[str, bool]]) -> str:
    """Join generated ``(text, elided)`` pieces with normalized spacing.

    A single space separates pieces, except before closing punctuation, after
    opening punctuation and after an elided form (``l'``).  Straight double
    quotes alternate between opening and closing.
    """
    out: list[str] = []
    no_space_next = True
    quote_open = False
    for text, elided in pieces:
        if not text:
            continue
        glue = no_space_next
        if text == '"':
            if quote_open:
                glue = True
            quote_open = not quote_open
            no_space_after = quote_open
        else:
            no_space_after = text in OPENING or elided
        if text in CLOSING:
            glue = True
        if out and not glue:
            out.append(" ")
        out.append(text)
        no_space_next = no_space_after
    return "".join(out)
