"""Order-preserving map with a bounded number of calls in flight."""

from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Iterator, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(fn: Callable[[T], R], items: Iterable[T], jobs: int = 1, window: int | None = None) -> Iterator[R]:
    """Like ``map(fn, items)``; with ``jobs > 1`` calls run on a thread pool.

    Results always come back in input order, so output never depends on
    ``jobs``.  At most ``window`` (default ``2 * jobs``) calls are pending.
    """
    if jobs <= 1:
        yield from map(fn, items)
        return
    window = window or 2 * jobs
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        pending: deque = deque()
        for item in items:
            pending.append(pool.submit(fn, item))
            if len(pending) >= window:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()
