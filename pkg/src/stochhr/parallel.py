"""Ordered task pool: results come back keyed by task index."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor


def ordered_map(fn, tasks, threads: int = 1) -> list:
    tasks = list(tasks)
    if threads <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks))
