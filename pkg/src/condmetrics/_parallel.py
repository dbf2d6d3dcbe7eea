"""Order-preserving parallel map bounded by CONDMETRICS_THREADS.

Results are always reduced in input order, so outputs are bit-identical
regardless of worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def thread_limit() -> int:
    raw = os.environ.get("CONDMETRICS_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        n = 1
    return max(1, n)


def ordered_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    work: Sequence[T] = list(items)
    n = min(thread_limit(), len(work))
    if n <= 1:
        return [fn(item) for item in work]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, work))
