"""Few-shot JSON prompts for LLM translation, and strict response checking.

A prompt has two blocks: an instruction followed by a JSON object of
exemplar pairs, then a fill-in instruction followed by the same JSON shape
with empty target values::

    {"translations": [{"Ladin": "...", "Italian": "..."}, ...]}
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Sequence

from ..errors import ValidationError

DEFAULT_EXEMPLARS = 8
DEFAULT_TARGETS = 16

INTRO = "Here are example translations from {src} to {tgt}:"
FILL = (
    "Translate each of the {n} entries below whose {tgt} value is empty. "
    "Return the same JSON object with the {tgt} values filled in:"
)


@dataclass(frozen=True)
class PromptBatch:
    exemplars: tuple[tuple[str, str], ...]
    targets: tuple[str, ...]
    seed: int
    src_key: str = "Ladin"
    tgt_key: str = "Italian"

    def render(self, intro: str = INTRO, fill: str = FILL) -> str:
        shots = {"translations": [{self.src_key: s, self.tgt_key: t} for s, t in self.exemplars]}
        todo = {"translations": [{self.src_key: s, self.tgt_key: ""} for s in self.targets]}
        return "\n\n".join(
            [
                intro.format(src=self.src_key, tgt=self.tgt_key),
                json.dumps(shots, ensure_ascii=False, indent=4),
                fill.format(n=len(self.targets), src=self.src_key, tgt=self.tgt_key),
                json.dumps(todo, ensure_ascii=False, indent=4),
            ]
        ) + "\n"


def make_batch(
    authentic: Sequence[tuple[str, str]],
    targets: Sequence[str],
    seed: int,
    n_exemplars: int = DEFAULT_EXEMPLARS,
    max_targets: int = DEFAULT_TARGETS,
    src_key: str = "Ladin",
    tgt_key: str = "Italian",
) -> PromptBatch:
    if len(authentic) < n_exemplars:
        raise ValueError(f"need at least {n_exemplars} authentic pairs for exemplars, got {len(authentic)}")
    if not targets:
        raise ValueError("no target sentences")
    if len(targets) > max_targets:
        raise ValueError(f"at most {max_targets} targets per prompt, got {len(targets)}")
    exemplars = random.Random(seed).sample(list(authentic), n_exemplars)
    return PromptBatch(tuple((s, t) for s, t in exemplars), tuple(targets), seed, src_key, tgt_key)


def build_prompt(
    authentic: Sequence[tuple[str, str]],
    targets: Sequence[str],
    seed: int,
    n_exemplars: int = DEFAULT_EXEMPLARS,
    max_targets: int = DEFAULT_TARGETS,
) -> str:
    """Prompt text for ``targets``; identical arguments give identical bytes."""
    return make_batch(authentic, targets, seed, n_exemplars, max_targets).render()


def _extract_json(text: str):
    start, end = text.find("{"), text.rfind("}")
    if start < 0 or end < start:
        raise ValidationError("malformed", "no JSON object in response")
    try:
        return json.loads(text[start : end + 1])
    except json.JSONDecodeError as exc:
        raise ValidationError("malformed", f"invalid JSON: {exc}") from None


def parse_response(
    text: str, sources: Sequence[str], src_key: str = "Ladin", tgt_key: str = "Italian"
) -> list[tuple[str, str]]:
    """Validate a filled response against the sources it was asked to translate.

    Text around the JSON object (code fences, chatter) is ignored.
    """
    obj = _extract_json(text)
    items = obj.get("translations") if isinstance(obj, dict) else None
    if not isinstance(items, list) or not all(
        isinstance(it, dict) and isinstance(it.get(src_key), str) and isinstance(it.get(tgt_key), str)
        for it in items
    ):
        raise ValidationError("malformed", f'expected {{"translations": [{{"{src_key}": str, "{tgt_key}": str}}, ...]}}')
    if len(items) != len(sources):
        raise ValidationError("count-mismatch", f"expected {len(sources)} entries, got {len(items)}")
    out = []
    for i, (it, src) in enumerate(zip(items, sources)):
        if it[src_key] != src:
            raise ValidationError("source-mutated", f"entry {i}: source text changed")
        if not it[tgt_key].strip():
            raise ValidationError("empty-translation", f"entry {i}: empty {tgt_key} value")
        out.append((src, it[tgt_key]))
    return out


def fill_response(prompt: str, translations: Sequence[str], tgt_key: str = "Italian") -> str:
    """The response a perfect model would give (used by tests and offline runs)."""
    start = prompt.rfind('{\n    "translations"')
    obj = json.loads(prompt[start:])
    for item, t in zip(obj["translations"], translations):
        item[tgt_key] = t
    return json.dumps(obj, ensure_ascii=False, indent=4) + "\n"
