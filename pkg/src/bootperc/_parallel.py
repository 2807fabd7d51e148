"""Deterministic trial-level parallelism.

Jobs are mapped in index order and results aggregated positionally, so
outputs are identical for any worker count.  Worker count resolution:
explicit argument, else the BOOTPERC_WORKERS environment variable, else
min(4, cpu_count).
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

WORKERS_ENV = "BOOTPERC_WORKERS"


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        if env:
            workers = int(env)
        else:
            workers = min(4, os.cpu_count() or 1)
    return max(1, int(workers))


def run_indexed(fn, payloads: list, workers: int | None = None) -> list:
    """[fn(p) for p in payloads], possibly across processes, order kept."""
    workers = resolve_workers(workers)
    if workers <= 1 or len(payloads) <= 1:
        return [fn(p) for p in payloads]
    chunk = max(1, len(payloads) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, payloads, chunksize=chunk))
