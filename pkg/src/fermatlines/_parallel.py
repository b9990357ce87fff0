"""Order-preserving map over worker processes.

The worker count comes from ``FERMATLINES_WORKERS`` (default 1).  Results
are always returned in input order, so output never depends on it.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")

ENV_VAR = "FERMATLINES_WORKERS"


def worker_count() -> int:
    raw = os.environ.get(ENV_VAR, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{ENV_VAR} must be an integer, got {raw!r}") from None
    return max(1, n)


def pmap(func: Callable[[T], R], items: Iterable[T], min_items: int = 8) -> list[R]:
    items = list(items)
    workers = worker_count()
    if workers == 1 or len(items) < min_items:
        return [func(x) for x in items]
    chunk = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items, chunksize=chunk))
