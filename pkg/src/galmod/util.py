"""Small shared runtime helpers."""

from __future__ import annotations

import os


def thread_count() -> int:
    """Worker count for internally parallel scans.

    Controlled by the optional GALMOD_THREADS environment variable; values
    below 1 or junk fall back to 1 (serial).
    """
    raw = os.environ.get("GALMOD_THREADS", "")
    try:
        value = int(raw)
    except ValueError:
        return 1
    return max(value, 1)
