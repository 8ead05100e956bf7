"""Translation backends.

A backend turns a batch of source sentences plus a direction into the same
number of target sentences, in order.  Transport problems raise
:class:`BackendError` (retried by the pipeline); a wrong number of outputs
raises :class:`BatchSizeError` (never retried).

Environment variables (credentials and transport settings only):

``LADINMT_HTTP_TIMEOUT``  seconds, default 60
``LADINMT_HTTP_AUTH``     sent verbatim as the ``Authorization`` header
"""

from __future__ import annotations

import json
import os
import shlex
import subprocess
import urllib.error
import urllib.request
import zlib
from pathlib import Path
from typing import Callable, Mapping, Sequence

from ..errors import BackendError, BatchSizeError, ConfigError, ValidationError
from ..langs import DIRECTIONS, parse_direction
from .prompt import DEFAULT_EXEMPLARS, DEFAULT_TARGETS, make_batch, parse_response

KINDS = ("identity", "internal-rbmt", "external-command", "http-endpoint", "llm-json")


class Backend:
    kind = "abstract"

    def __init__(self, id: str, batch_size: int = 16, timeout: float | None = None):
        if batch_size < 1:
            raise ConfigError(f"backend {id}: batch_size must be >= 1")
        self.id = id
        self.batch_size = batch_size
        self.timeout = timeout

    def _translate(self, sentences: Sequence[str], direction: str) -> list[str]:
        raise NotImplementedError

    def translate(self, sentences: Sequence[str], direction: str) -> list[str]:
        direction = parse_direction(direction)
        out = list(self._translate(list(sentences), direction))
        if len(out) != len(sentences):
            raise BatchSizeError(f"backend {self.id} returned {len(out)} outputs for {len(sentences)} inputs")
        return out

    def __repr__(self):
        return f"<{type(self).__name__} id={self.id!r}>"


class IdentityBackend(Backend):
    kind = "identity"

    def _translate(self, sentences, direction):
        return list(sentences)


class FunctionBackend(Backend):
    """Wraps a Python callable ``fn(sentences, direction) -> list``."""

    kind = "function"

    def __init__(self, id: str, fn: Callable[[list[str], str], list[str]], batch_size: int = 16):
        super().__init__(id, batch_size)
        self.fn = fn

    def _translate(self, sentences, direction):
        return self.fn(sentences, direction)


class RBMTBackend(Backend):
    kind = "internal-rbmt"

    def __init__(self, id: str, dictionary, rules: Mapping[str, Sequence], batch_size: int = 16):
        super().__init__(id, batch_size)
        self.dictionary = dictionary
        self.rules = {parse_direction(k): list(v) for k, v in rules.items()}

    @classmethod
    def default(cls, id: str = "rbmt", batch_size: int = 16) -> "RBMTBackend":
        from ..morphodict import default_dictionary_dir, load_dictionary
        from ..rules import default_rules_path, load_rules

        d = load_dictionary(default_dictionary_dir())
        return cls(id, d, {dr: load_rules(default_rules_path(dr)) for dr in DIRECTIONS}, batch_size)

    def _translate(self, sentences, direction):
        from ..transfer import translate

        rules = self.rules.get(direction, [])
        return [translate(self.dictionary, rules, s, direction).target_text for s in sentences]


class ExternalCommandBackend(Backend):
    """Runs ``command`` once per batch: one sentence per input line, one translation per output line.

    ``{direction}`` in the command is replaced; the direction is also passed
    as ``LADINMT_DIRECTION`` in the environment.
    """

    kind = "external-command"

    def __init__(self, id: str, command: str | Sequence[str], batch_size: int = 16, timeout: float | None = 600):
        super().__init__(id, batch_size, timeout)
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        if not self.command:
            raise ConfigError(f"backend {id}: empty command")

    def _translate(self, sentences, direction):
        argv = [a.replace("{direction}", direction) for a in self.command]
        for s in sentences:
            if "\n" in s:
                raise BackendError(f"backend {self.id}: sentence contains a newline")
        env = dict(os.environ, LADINMT_DIRECTION=direction)
        try:
            proc = subprocess.run(
                argv,
                input="".join(s + "\n" for s in sentences),
                capture_output=True,
                text=True,
                encoding="utf-8",
                timeout=self.timeout,
                env=env,
            )
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise BackendError(f"backend {self.id}: {exc}") from None
        if proc.returncode != 0:
            raise BackendError(f"backend {self.id}: exit status {proc.returncode}: {proc.stderr.strip()[:200]}")
        return proc.stdout.splitlines()


def _http_timeout(default: float | None) -> float:
    value = os.environ.get("LADINMT_HTTP_TIMEOUT")
    if value is None:
        return default if default is not None else 60.0
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"LADINMT_HTTP_TIMEOUT is not a number: {value!r}") from None


def post_json(url: str, body: dict, timeout: float | None = None) -> dict:
    headers = {"Content-Type": "application/json"}
    auth = os.environ.get("LADINMT_HTTP_AUTH")
    if auth:
        headers["Authorization"] = auth
    req = urllib.request.Request(url, json.dumps(body).encode("utf-8"), headers, method="POST")
    try:
        with urllib.request.urlopen(req, timeout=_http_timeout(timeout)) as resp:
            return json.loads(resp.read().decode("utf-8"))
    except (urllib.error.URLError, TimeoutError, OSError) as exc:
        raise BackendError(f"POST {url}: {exc}") from None
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise BackendError(f"POST {url}: response is not JSON: {exc}") from None


class HttpBackend(Backend):
    """POST ``{"direction": ..., "sentences": [...]}``, expect ``{"translations": [...]}``."""

    kind = "http-endpoint"

    def __init__(self, id: str, url: str, batch_size: int = 16, timeout: float | None = None):
        super().__init__(id, batch_size, timeout)
        self.url = url

    def _translate(self, sentences, direction):
        resp = post_json(self.url, {"direction": direction, "sentences": list(sentences)}, self.timeout)
        out = resp.get("translations") if isinstance(resp, dict) else None
        if not isinstance(out, list) or not all(isinstance(t, str) for t in out):
            raise BackendError(f"backend {self.id}: response lacks a 'translations' string list")
        return out


class LLMJsonBackend(Backend):
    """Few-shot JSON prompting against a text-completion endpoint.

    The endpoint receives ``{"prompt": text}`` and must answer with
    ``{"text": completion}``.  Only Ladin -> Italian is supported, like the
    exemplar keys.  A response failing validation counts as a backend error
    (so it is retried); the exemplar seed depends on the batch content, so
    a retry sends the same prompt.
    """

    kind = "llm-json"

    def __init__(
        self,
        id: str,
        url: str,
        authentic: Sequence[tuple[str, str]],
        seed: int = 0,
        n_exemplars: int = DEFAULT_EXEMPLARS,
        batch_size: int = DEFAULT_TARGETS,
        timeout: float | None = None,
        complete: Callable[[str], str] | None = None,
    ):
        super().__init__(id, batch_size, timeout)
        self.url = url
        self.authentic = list(authentic)
        self.seed = seed
        self.n_exemplars = n_exemplars
        self.complete = complete or self._post

    def _post(self, prompt: str) -> str:
        resp = post_json(self.url, {"prompt": prompt}, self.timeout)
        text = resp.get("text") if isinstance(resp, dict) else None
        if not isinstance(text, str):
            raise BackendError(f"backend {self.id}: response lacks a 'text' string")
        return text

    def prompt_for(self, sentences: Sequence[str]) -> str:
        seed = self.seed ^ zlib.crc32("\n".join(sentences).encode("utf-8"))
        batch = make_batch(self.authentic, sentences, seed, self.n_exemplars, self.batch_size)
        return batch.render()

    def _translate(self, sentences, direction):
        if direction != "lvb-ita":
            raise ConfigError(f"backend {self.id}: llm-json prompts only translate lvb-ita")
        try:
            pairs = parse_response(self.complete(self.prompt_for(sentences)), sentences)
        except ValidationError as exc:
            raise BackendError(f"backend {self.id}: {exc}") from None
        return [t for _, t in pairs]


def backend_from_config(spec: Mapping, base_dir: str | Path = ".") -> Backend:
    """Build a backend from a config mapping with at least ``id`` and ``kind``."""
    try:
        id_, kind = spec["id"], spec["kind"]
    except KeyError as exc:
        raise ConfigError(f"backend config missing {exc}") from None
    base = Path(base_dir)
    batch = int(spec.get("batch_size", DEFAULT_TARGETS))
    timeout = spec.get("timeout")
    if kind == "identity":
        return IdentityBackend(id_, batch)
    if kind == "internal-rbmt":
        if "dict" not in spec:
            return RBMTBackend.default(id_, batch)
        from ..morphodict import load_dictionary
        from ..rules import load_rules

        d = load_dictionary(base / spec["dict"])
        rules = {dr: load_rules(base / p) for dr, p in spec.get("rules", {}).items()}
        return RBMTBackend(id_, d, rules, batch)
    if kind == "external-command":
        return ExternalCommandBackend(id_, spec["command"], batch, timeout if timeout is not None else 600)
    if kind == "http-endpoint":
        return HttpBackend(id_, spec["url"], batch, timeout)
    if kind == "llm-json":
        from .corpus import read_tsv

        pairs = [(r.src, r.tgt) for r in read_tsv(base / spec["authentic"])]
        return LLMJsonBackend(
            id_, spec["url"], pairs, int(spec.get("seed", 0)), int(spec.get("exemplars", DEFAULT_EXEMPLARS)), batch, timeout
        )
    raise ConfigError(f"backend {id_}: unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
