"""Kernel backend selection and thread-pool plumbing.

Environment contract:
  FORCEBOUND_BACKEND: "auto" (default), "numba", or "numpy". "auto" uses the
      numba kernels when numba imports cleanly and the numpy twins otherwise;
      "numba" fails loudly if numba is unusable.
  FORCEBOUND_THREADS: caps the worker-thread count for embarrassingly
      parallel grids and Monte Carlo trial chunks. Results are independent
      of the thread count by construction.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from types import ModuleType
from typing import Callable, Sequence, TypeVar

BACKEND_ENV = "FORCEBOUND_BACKEND"
THREADS_ENV = "FORCEBOUND_THREADS"

_kernels_cache: dict[str, ModuleType] = {}

T = TypeVar("T")
U = TypeVar("U")


def requested_backend() -> str:
    value = os.environ.get(BACKEND_ENV, "auto").strip().lower()
    if value not in ("auto", "numba", "numpy"):
        raise ValueError(f"{BACKEND_ENV} must be one of auto/numba/numpy, got {value!r}")
    return value


def kernels() -> ModuleType:
    """Return the active kernel module (numba-jitted or pure numpy)."""
    request = requested_backend()
    if request in _kernels_cache:
        return _kernels_cache[request]
    if request == "numpy":
        from . import _kernels_numpy as mod
    elif request == "numba":
        from . import _kernels_numba as mod
    else:
        try:
            from . import _kernels_numba as mod
        except ImportError:
            from . import _kernels_numpy as mod
    _kernels_cache[request] = mod
    return mod


def active_backend_name() -> str:
    return kernels().BACKEND_NAME


def thread_count() -> int:
    value = os.environ.get(THREADS_ENV)
    if value is None:
        return min(4, os.cpu_count() or 1)
    count = int(value)
    if count < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {value!r}")
    return count


def parallel_map(fn: Callable[[T], U], items: Sequence[T]) -> list[U]:
    """Map fn over items, preserving input order in the output regardless of threads."""
    workers = min(thread_count(), max(1, len(items)))
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
