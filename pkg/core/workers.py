"""Deterministic worker pool."""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Optional, TypeVar

import numpy as np


logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def default_threads() -> int:
    """Worker count from HECKE_THREADS (default 1)."""
    raw = os.environ.get("HECKE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        logger.warning("ignoring non-integer HECKE_THREADS=%r", raw)
        return 1


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> list[R]:
    """Map fn over items, returning results in input order.

    Reductions over the returned list are therefore independent of scheduling.
    """
    items = list(items)
    threads = threads or default_threads()
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def chunked_apply(fn: Callable[[np.ndarray], np.ndarray], values: np.ndarray,
                  chunk: int = 512, threads: Optional[int] = None) -> np.ndarray:
    """Apply a vectorised fn over fixed-size chunks and concatenate in order."""
    values = np.asarray(values)
    if values.size <= chunk:
        return np.asarray(fn(values))
    pieces = [values[i:i + chunk] for i in range(0, values.size, chunk)]
    return np.concatenate(ordered_map(fn, pieces, threads))
