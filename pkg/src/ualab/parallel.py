"""Bounded worker pool for independent seeded trials."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, TypeVar

T = TypeVar("T")


class TrialError(RuntimeError):
    """A trial raised; carries the trial index and its derived seed."""

    def __init__(self, index: int, seed: int | None, cause: BaseException):
        super().__init__(f"trial {index} (seed {seed}) failed: {cause!r}")
        self.index = index
        self.seed = seed


def worker_count() -> int:
    cap = os.environ.get("UALAB_THREADS")
    avail = os.cpu_count() or 1
    if cap:
        try:
            return max(1, min(avail, int(cap)))
        except ValueError:
            raise ValueError(f"UALAB_THREADS must be an integer, got {cap!r}") from None
    return avail


def map_trials(
    fn: Callable[[int], T],
    count: int,
    seed_of: Callable[[int], int] | None = None,
    workers: int | None = None,
) -> list[T]:
    """Run ``fn(i)`` for ``i < count`` and return results in index order.

    ``fn`` must be picklable when more than one worker is used. Results are
    keyed by index, so the outcome does not depend on scheduling.
    """
    workers = worker_count() if workers is None else max(1, workers)
    results: dict[int, T] = {}
    if workers == 1 or count <= 1:
        for i in range(count):
            try:
                results[i] = fn(i)
            except Exception as exc:
                raise TrialError(i, seed_of(i) if seed_of else None, exc) from exc
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {i: pool.submit(fn, i) for i in range(count)}
            for i, fut in futures.items():
                try:
                    results[i] = fut.result()
                except Exception as exc:
                    raise TrialError(i, seed_of(i) if seed_of else None, exc) from exc
    return [results[i] for i in range(count)]

