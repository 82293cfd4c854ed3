"""Contiguous chunking and a process pool with per-worker shared state.

Big-integer arithmetic in CPython holds the GIL, so real parallelism needs
processes.  Each worker receives the read-only state once through the pool
initializer and then only sees index ranges.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

_worker_state = None


def chunk_bounds(n_items: int, workers: int) -> list[tuple[int, int]]:
    """Split ``range(n_items)`` into ``workers`` contiguous, near-equal slices.

    The first ``n_items % workers`` slices get one extra element.  Empty
    slices are dropped, so fewer bounds than workers come back when
    ``n_items < workers``.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    base, extra = divmod(n_items, workers)
    bounds = []
    start = 0
    for w in range(workers):
        stop = start + base + (1 if w < extra else 0)
        if stop > start:
            bounds.append((start, stop))
        start = stop
    return bounds


def _install(state):
    global _worker_state
    _worker_state = state


def _call(fn, lo, hi):
    return fn(_worker_state, lo, hi)


def run_chunked(fn, state, n_items: int, workers: int) -> list:
    """Evaluate ``fn(state, lo, hi)`` over contiguous chunks, in order.

    With one worker (or one chunk) everything runs inline in the caller.
    ``fn`` must be a module-level function so it can be pickled.
    """
    bounds = chunk_bounds(n_items, workers)
    if len(bounds) <= 1:
        return [fn(state, lo, hi) for lo, hi in bounds]
    with ProcessPoolExecutor(max_workers=len(bounds), initializer=_install, initargs=(state,)) as pool:
        futures = [pool.submit(_call, fn, lo, hi) for lo, hi in bounds]
        return [f.result() for f in futures]
