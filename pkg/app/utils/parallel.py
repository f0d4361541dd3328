"""Index-ordered task execution, sequential or on a thread pool."""

from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, List, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def run_ordered(fn: Callable[[T], R], tasks: Sequence[T], max_workers: int = 1) -> List[R]:
    """Apply `fn` to every task; results come back in task order whatever the worker count."""
    if max_workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]

    ordered: List[R] = [None] * len(tasks)  # type: ignore[list-item]

    def _run_one(idx: int, task: T) -> None:
        ordered[idx] = fn(task)

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = [executor.submit(_run_one, i, t) for i, t in enumerate(tasks)]
        for f in as_completed(futures):
            f.result()  # re-raise any exception from worker
    return ordered
