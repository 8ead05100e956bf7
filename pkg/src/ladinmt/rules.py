"""Flat (1-level) structural transfer rules and their line-oriented DSL.

One rule per line::

    RULE drop-pa: MATCH [lemma=pa cat=adverb] => DELETE(0)
    RULE det-noun-gender: MATCH [cat=determiner] [cat=noun] => SET(0.gender=1.gender)

Matcher keys ``lemma``, ``cat`` and ``tag`` test the *source* analysis of a
unit; ``tlemma``, ``tcat`` and ``ttag`` test the target side after lexical
transfer.  ``|`` separates alternatives (``lemma=da|de``); repeated ``tag``
keys must all hold.  Actions address pattern positions (0-based) and edit
the target side:

    DELETE(i)              drop unit i
    SET(i.attr=j.attr)     copy unit j's tag of attribute group ``attr``
    SET(i.attr=value)      put a literal tag of that group
    REORDER(i,j,...)       emit the span in this order
    REPLACE(i, lemma)      replace unit i's target lemma
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Union

from .errors import RuleSyntaxError
from .morphodict import CATEGORIES, TagInventory, default_tags

MATCH_KEYS = ("lemma", "cat", "tag", "tlemma", "tcat", "ttag")
EXTRA_CATEGORIES = ("punct", "number")


@dataclass(frozen=True)
class Matcher:
    lemma: frozenset[str] | None = None
    category: frozenset[str] | None = None
    tags: tuple[str, ...] = ()
    tlemma: frozenset[str] | None = None
    tcategory: frozenset[str] | None = None
    ttags: tuple[str, ...] = ()

    def matches(self, unit) -> bool:
        a = unit.source_analysis
        if a is None:  # unknown words never match
            return False
        if self.lemma is not None and a.lemma not in self.lemma:
            return False
        if self.category is not None and a.category not in self.category:
            return False
        if any(t not in a.tags for t in self.tags):
            return False
        if self.tlemma is not None and unit.lemma not in self.tlemma:
            return False
        if self.tcategory is not None and unit.category not in self.tcategory:
            return False
        return all(t in unit.tags for t in self.ttags)


@dataclass(frozen=True)
class Delete:
    index: int


@dataclass(frozen=True)
class SetTag:
    index: int
    attr: str
    value: str | None = None  # literal tag
    source: int | None = None  # copy from this position
    group: tuple[str, ...] = ()  # every tag of ``attr``; filled from the inventory when empty

    def __post_init__(self):
        if not self.group:
            object.__setattr__(self, "group", default_tags().groups[self.attr])


@dataclass(frozen=True)
class Reorder:
    order: tuple[int, ...]


@dataclass(frozen=True)
class ReplaceLemma:
    index: int
    lemma: str


Action = Union[Delete, SetTag, Reorder, ReplaceLemma]


@dataclass(frozen=True)
class TransferRule:
    id: str
    pattern: tuple[Matcher, ...]
    actions: tuple[Action, ...]

    def __post_init__(self):
        n = len(self.pattern)
        if n < 1:
            raise ValueError(f"rule {self.id}: empty pattern")
        for act in self.actions:
            if isinstance(act, Reorder):
                if sorted(act.order) != list(range(n)):
                    raise ValueError(f"rule {self.id}: REORDER must permute 0..{n - 1}")
                continue
            idx = [act.index]
            if isinstance(act, SetTag) and act.source is not None:
                idx.append(act.source)
            if any(not 0 <= i < n for i in idx):
                raise ValueError(f"rule {self.id}: action index out of range for pattern of length {n}")

    def __len__(self):
        return len(self.pattern)


# ---------------------------------------------------------------------------
# parser

_RULE_RE = re.compile(r"^RULE\s+(?P<id>[\w.-]+)\s*:\s*MATCH\s+(?P<pattern>.+?)\s*=>\s*(?P<actions>.+)$")
_MATCHER_RE = re.compile(r"\[([^\]]*)\]")
_ACTION_RE = re.compile(r"^(?P<name>[A-Z]+)\((?P<args>.*)\)$")


def _matcher(body: str, inventory: TagInventory, where) -> Matcher:
    fields: dict[str, object] = {}
    tags: list[str] = []
    ttags: list[str] = []
    items = body.split()
    if not items:
        raise RuleSyntaxError("empty matcher []", *where)
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not value or key not in MATCH_KEYS:
            raise RuleSyntaxError(f"bad matcher item {item!r}", *where)
        alts = frozenset(value.split("|"))
        if key in ("tag", "ttag"):
            for t in alts:
                if t not in inventory.tags:
                    raise RuleSyntaxError(f"unknown tag {t!r}", *where)
            (tags if key == "tag" else ttags).extend(sorted(alts))
            continue
        if key in ("cat", "tcat"):
            for c in alts:
                if c not in CATEGORIES and c not in EXTRA_CATEGORIES:
                    raise RuleSyntaxError(f"unknown category {c!r}", *where)
        if key in fields:
            raise RuleSyntaxError(f"key {key!r} repeated in one matcher", *where)
        fields[key] = alts
    return Matcher(
        lemma=fields.get("lemma"),
        category=fields.get("cat"),
        tags=tuple(tags),
        tlemma=fields.get("tlemma"),
        tcategory=fields.get("tcat"),
        ttags=tuple(ttags),
    )


def _int(text, where) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise RuleSyntaxError(f"expected an index, got {text.strip()!r}", *where) from None


def _action(text: str, inventory: TagInventory, where) -> Action:
    m = _ACTION_RE.match(text.strip())
    if not m:
        raise RuleSyntaxError(f"bad action {text.strip()!r}", *where)
    name, args = m.group("name"), m.group("args")
    if name == "DELETE":
        return Delete(_int(args, where))
    if name == "REORDER":
        return Reorder(tuple(_int(a, where) for a in args.split(",")))
    if name == "REPLACE":
        idx, sep, lemma = args.partition(",")
        if not sep or not lemma.strip():
            raise RuleSyntaxError("REPLACE needs (index, lemma)", *where)
        return ReplaceLemma(_int(idx, where), lemma.strip())
    if name == "SET":
        lhs, sep, rhs = args.partition("=")
        i, dot, attr = lhs.strip().partition(".")
        if not sep or not dot or attr not in inventory.groups:
            raise RuleSyntaxError(f"SET needs (i.attr=...) with attr in {sorted(inventory.groups)}", *where)
        rhs = rhs.strip()
        j, dot, attr2 = rhs.partition(".")
        if dot:
            if attr2 != attr:
                raise RuleSyntaxError(f"SET copies between the same attribute, got {attr}/{attr2}", *where)
            return SetTag(_int(i, where), attr, source=_int(j, where), group=inventory.groups[attr])
        if rhs not in inventory.groups[attr]:
            raise RuleSyntaxError(f"{rhs!r} is not a {attr} tag", *where)
        return SetTag(_int(i, where), attr, value=rhs, group=inventory.groups[attr])
    raise RuleSyntaxError(f"unknown action {name}", *where)


def parse_rules(text: str, path: str = "<rules>", inventory: TagInventory | None = None) -> list[TransferRule]:
    inventory = inventory or default_tags()
    rules: list[TransferRule] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = (path, lineno)
        m = _RULE_RE.match(line)
        if not m:
            raise RuleSyntaxError("expected 'RULE <id>: MATCH [...] => ACTION; ...'", *where)
        rid = m.group("id")
        if rid in seen:
            raise RuleSyntaxError(f"duplicate rule id {rid!r}", *where)
        seen.add(rid)
        pattern_text = m.group("pattern")
        if _MATCHER_RE.sub("", pattern_text).strip():
            raise RuleSyntaxError("pattern must be a sequence of [...] matchers", *where)
        pattern = tuple(_matcher(b, inventory, where) for b in _MATCHER_RE.findall(pattern_text))
        actions = tuple(_action(a, inventory, where) for a in m.group("actions").split(";") if a.strip())
        try:
            rules.append(TransferRule(rid, pattern, actions))
        except ValueError as exc:
            raise RuleSyntaxError(str(exc), *where) from None
    return rules


def load_rules(path) -> list[TransferRule]:
    return parse_rules(Path(path).read_text(encoding="utf-8"), str(path))


def default_rules_path(direction: str = "lvb-ita"):
    from importlib import resources

    return resources.files("ladinmt").joinpath(f"data/lld-ita/rules.{direction}.txt")


def check_disjoint(rules: Iterable[TransferRule]) -> bool:
    """True when no two rules share a source lemma (used by property tests)."""
    seen: set[str] = set()
    for r in rules:
        mine = set()
        for m in r.pattern:
            if m.lemma is None:
                return False
            mine |= m.lemma
        if seen & mine:
            return False
        seen |= mine
    return True
