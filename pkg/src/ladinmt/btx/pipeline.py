"""Batch orchestration: retries, quarantine, checkpoints, bounded concurrency."""

from __future__ import annotations

import hashlib
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator, Sequence

from ..errors import BackendError, BatchSizeError
from ..langs import parse_direction, reverse
from ..parallel import ordered_map
from .backends import Backend
from .corpus import BACK_TRANSLATED, CorpusRecord

log = logging.getLogger("ladinmt.btx")


@dataclass(frozen=True)
class RetryPolicy:
    attempts: int = 3
    backoff: float = 1.0  # seconds before the 2nd attempt; doubles after that

    def delay(self, attempt: int) -> float:
        return self.backoff * 2 ** (attempt - 1)


@dataclass
class RunReport:
    batches: int = 0
    sentences: int = 0
    translated: int = 0
    quarantined_batches: int = 0
    quarantined_sentences: int = 0
    resumed_batches: int = 0
    retries: int = 0
    seconds: float = 0.0
    quarantine_ids: list[str] = field(default_factory=list)

    def lines(self) -> list[str]:
        return [
            f"batches={self.batches}",
            f"sentences={self.sentences}",
            f"translated={self.translated}",
            f"quarantined_batches={self.quarantined_batches}",
            f"quarantined_sentences={self.quarantined_sentences}",
            f"resumed_batches={self.resumed_batches}",
            f"retries={self.retries}",
        ]


def batch_id(index: int, direction: str, sentences: Sequence[str]) -> str:
    h = hashlib.sha256(("\n".join([direction, *sentences])).encode("utf-8")).hexdigest()[:12]
    return f"{index:06d}-{h}"


def _batches(items: Iterable[str], size: int) -> Iterator[list[str]]:
    buf: list[str] = []
    for s in items:
        buf.append(s)
        if len(buf) == size:
            yield buf
            buf = []
    if buf:
        yield buf


def load_checkpoint(path) -> dict[str, list[str]]:
    done: dict[str, list[str]] = {}
    p = Path(path)
    if not p.exists():
        return done
    with open(p, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                continue  # torn last line of an interrupted run
            done[obj["batch"]] = obj["outputs"]
    return done


def probe(backend: Backend, direction: str, sentence: str = "bun dé") -> None:
    """One-sentence health check; raises BackendError when unhealthy."""
    out = backend.translate([sentence], direction)
    if len(out) != 1:
        raise BatchSizeError(f"backend {backend.id} failed the probe")


def translate_stream(
    backend: Backend,
    sentences: Iterable[str],
    direction: str,
    *,
    batch_size: int | None = None,
    retry: RetryPolicy = RetryPolicy(),
    sleep: Callable[[float], None] = time.sleep,
    quarantine=None,
    checkpoint=None,
    jobs: int = 1,
    report: RunReport | None = None,
) -> Iterator[tuple[str, str | None]]:
    """Yield ``(source, translation)`` in input order; quarantined sentences get ``None``.

    Failing batches are retried per ``retry`` and then appended to the
    ``quarantine`` JSONL file.  A batch whose output count is wrong is
    quarantined at once.  With ``checkpoint``, finished batches are appended
    to that JSONL file and skipped (not re-requested) on a later run.
    """
    direction = parse_direction(direction)
    size = batch_size or backend.batch_size
    report = report if report is not None else RunReport()
    done = load_checkpoint(checkpoint) if checkpoint else {}
    started = time.perf_counter()

    def attempt(batch: list[str]) -> tuple[list[str] | None, str, int]:
        retries = 0
        for k in range(1, retry.attempts + 1):
            try:
                return backend.translate(batch, direction), "", retries
            except BatchSizeError as exc:
                return None, str(exc), retries
            except BackendError as exc:
                err = str(exc)
                if k < retry.attempts:
                    retries += 1
                    sleep(retry.delay(k))
        return None, err, retries

    def work(item):
        bid, batch = item
        if bid in done and len(done[bid]) == len(batch):
            return bid, batch, done[bid], "", 0, True
        out, err, retries = attempt(batch)
        return bid, batch, out, err, retries, False

    items = ((batch_id(i, direction, b), b) for i, b in enumerate(_batches(sentences, size)))
    qfh = open(quarantine, "a", encoding="utf-8") if quarantine else None
    cfh = open(checkpoint, "a", encoding="utf-8") if checkpoint else None
    try:
        for bid, batch, out, err, retries, resumed in ordered_map(work, items, jobs):
            report.batches += 1
            report.sentences += len(batch)
            report.retries += retries
            if out is None:
                report.quarantined_batches += 1
                report.quarantined_sentences += len(batch)
                report.quarantine_ids.append(bid)
                log.warning("event=quarantine backend=%s batch=%s size=%d error=%r", backend.id, bid, len(batch), err)
                if qfh:
                    entry = {"batch": bid, "backend": backend.id, "direction": direction, "error": err, "sentences": batch}
                    qfh.write(json.dumps(entry, ensure_ascii=False) + "\n")
                    qfh.flush()
                for s in batch:
                    yield s, None
                continue
            if resumed:
                report.resumed_batches += 1
            elif cfh:
                cfh.write(json.dumps({"batch": bid, "outputs": out}, ensure_ascii=False) + "\n")
                cfh.flush()
            report.translated += len(batch)
            log.info(
                "event=batch backend=%s batch=%s size=%d resumed=%s elapsed=%.2fs",
                backend.id, bid, len(batch), resumed, time.perf_counter() - started,
            )
            yield from zip(batch, out)
    finally:
        for fh in (qfh, cfh):
            if fh:
                fh.close()
        report.seconds = time.perf_counter() - started


def backtranslate(
    backend: Backend,
    monolingual: Iterable[str],
    direction: str,
    *,
    check_health: bool = True,
    **kwargs,
) -> Iterator[CorpusRecord]:
    """Synthetic pairs whose *target* side is the monolingual text.

    ``direction`` is the direction of the produced records, so the backend
    is asked to translate the other way (target language -> source).
    Quarantined sentences produce no record.
    """
    direction = parse_direction(direction)
    if check_health:
        probe(backend, reverse(direction))
    for text, synthetic in translate_stream(backend, monolingual, reverse(direction), **kwargs):
        if synthetic is not None:
            yield CorpusRecord(synthetic, text, direction, BACK_TRANSLATED, backend.id)
