"""Worker-thread budget shared by the parallel pieces of the library.

The environment variable VORPCA_THREADS caps the number of worker threads;
0 (the default) means auto-detect.  Parallel reductions in this package are
written so results never depend on thread scheduling.
"""

from __future__ import annotations

import os

ENV_VAR = "VORPCA_THREADS"


def max_workers() -> int:
    """Worker-thread cap from VORPCA_THREADS (0 = auto)."""
    raw = os.environ.get(ENV_VAR, "0").strip()
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{ENV_VAR} must be an integer, got {raw!r}") from None
    if value < 0:
        raise ValueError(f"{ENV_VAR} must be >= 0, got {value}")
    if value == 0:
        return os.cpu_count() or 1
    return value
