"""Deterministic seed derivation.

All derived randomness flows through stable_seed so results are
reproducible across processes, platforms, and thread schedules
(PYTHONHASHSEED never enters the picture).
"""

from __future__ import annotations

import hashlib


def stable_seed(*parts: object) -> int:
    """Collapse arbitrary labeled parts into a 64-bit seed."""
    joined = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(joined.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
