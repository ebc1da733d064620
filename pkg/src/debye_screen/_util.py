"""Small shared runtime helpers."""

from __future__ import annotations

import os

_ENV_THREADS = "DEBYE_SCREEN_THREADS"


def worker_count() -> int:
    """Worker cap from the DEBYE_SCREEN_THREADS environment variable.

    0 or unset means auto (the CPU count); values are clamped to at
    least 1. Malformed values fall back to auto rather than erroring,
    since the env var is advisory.
    """
    raw = os.environ.get(_ENV_THREADS, "").strip()
    auto = os.cpu_count() or 1
    if not raw:
        return auto
    try:
        n = int(raw)
    except ValueError:
        return auto
    if n <= 0:
        return auto
    return max(1, min(n, auto))
