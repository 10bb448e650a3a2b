# orchestrator/task_scheduler.py
# Replicate fan-out. Results come back in submission order whatever n_jobs is.
from __future__ import annotations

from collections.abc import Callable, Sequence
from typing import Any, TypeVar

from joblib import Parallel, delayed

from services.settings import get_settings

J = TypeVar("J")


def resolve_jobs(n_jobs: int | None = None) -> int:
    if n_jobs is None:
        n_jobs = get_settings().runtime.n_jobs
    return n_jobs if n_jobs != 0 else 1


def run_replicates(
    fn: Callable[[J], Any], jobs: Sequence[J], n_jobs: int | None = None
) -> list[Any]:
    n = resolve_jobs(n_jobs)
    if n == 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    return list(Parallel(n_jobs=n)(delayed(fn)(job) for job in jobs))
