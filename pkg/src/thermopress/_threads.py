"""Shared thread-pool policy.  THERMOPRESS_THREADS caps the worker count;
unset or invalid values fall back to the CPU count."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    raw = os.environ.get("THERMOPRESS_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        n = os.cpu_count() or 1
    return n


def ordered_map(fn, items):
    """Map preserving input order; sequential when one worker suffices."""
    items = list(items)
    workers = min(worker_count(), max(len(items), 1))
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
