"""Order-preserving parallel map with a process-wide worker cap."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from logging import getLogger
from typing import TYPE_CHECKING

from .exceptions import DomainError

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable
    from typing import TypeVar

    T = TypeVar("T")
    R = TypeVar("R")

log = getLogger(__name__)

_max_workers: int | None = None


def set_max_workers(n: int | None) -> None:
    """Cap the worker threads used by :func:`pmap`; ``None`` means CPU count."""
    global _max_workers
    if n is not None and n < 1:
        raise DomainError("threads", n, "must be >= 1")
    _max_workers = n
    log.debug("worker cap set to %s", n)


def max_workers() -> int:
    return _max_workers or os.cpu_count() or 1


def pmap(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """``[fn(item) for item in items]``, evaluated on a thread pool.

    Results come back in input order; numpy releases the GIL in the heavy
    kernels, so threads are enough.
    """
    items = list(items)
    workers = min(max_workers(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
