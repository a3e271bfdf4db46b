"""Global worker-count cap, settable from the command line."""

from __future__ import annotations

_max_workers = 1


def set_max_workers(n: int) -> None:
    global _max_workers
    if n < 1:
        raise ValueError("worker count must be at least 1")
    _max_workers = int(n)


def max_workers() -> int:
    return _max_workers
