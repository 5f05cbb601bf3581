"""Optional thread fan-out over contour nodes.

WISHART_LAB_THREADS caps the pool (default 1 = sequential).  Results always
come back in submission order, so reductions stay deterministic either way.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

__all__ = ["thread_count", "pmap"]


def thread_count() -> int:
    raw = os.environ.get("WISHART_LAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def pmap(fn, items):
    items = list(items)
    n = thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))
