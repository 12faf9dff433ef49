"""Fixed-chunk fan-out over a bounded process pool.

Work is cut into chunks of ``CHUNK`` items whatever the worker count, and
every item draws from its own derived stream, so the assembled output is
bit-identical for any ``workers`` value.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np

CHUNK = 512


def _bounds(n_items: int, chunk: int):
    return [(s, min(n_items, s + chunk)) for s in range(0, n_items, chunk)]


def _call(fn, args, kwargs, bounds):
    start, stop = bounds
    return fn(*args, start, stop, **kwargs)


def run_chunked(fn, n_items: int, workers: int, *args, chunk: int = CHUNK, **kwargs) -> np.ndarray:
    """Evaluate ``fn(*args, start, stop, **kwargs)`` over all chunks and concatenate.

    ``fn`` must be a module-level function returning an array of length
    ``stop - start``.
    """
    if n_items <= 0:
        return np.empty(0)
    bounds = _bounds(n_items, chunk)
    task = partial(_call, fn, args, kwargs)
    workers = max(1, int(workers))
    if workers == 1 or len(bounds) == 1:
        parts = [task(b) for b in bounds]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(bounds))) as pool:
            parts = list(pool.map(task, bounds))
    return np.concatenate(parts)
