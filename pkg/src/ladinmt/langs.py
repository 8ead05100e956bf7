"""Language codes and translation directions."""

LANGS = ("lvb", "ita")

# target-language prefixes understood by the multilingual base model
TARGET_TAGS = {"ita": ">>ita<<", "lvb": ">>lld_Latn<<"}

DIRECTIONS = ("lvb-ita", "ita-lvb")


def parse_direction(value: str) -> str:
    """Normalize ``lvb-ita``, ``lvb→ita``, ``lvb2ita`` or ``lvb>ita`` to ``lvb-ita``."""
    v = value.strip().lower()
    for sep in ("→", "->", ">", "2", "_"):
        v = v.replace(sep, "-")
    if v not in DIRECTIONS:
        raise ValueError(f"unknown direction {value!r}; expected one of {', '.join(DIRECTIONS)}")
    return v


def split_direction(direction: str) -> tuple[str, str]:
    src, tgt = parse_direction(direction).split("-")
    return src, tgt


def reverse(direction: str) -> str:
    src, tgt = split_direction(direction)
    return f"{tgt}-{src}"
