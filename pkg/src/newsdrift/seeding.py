"""Stable RNG derivation.

Seeds are derived from sha256 over the joined key parts, never from the
builtin hash(), so draws are identical across processes and platforms and
independent of execution order.
"""

from __future__ import annotations

import hashlib
import random


def derive_seed(*parts) -> int:
    key = ":".join(str(p) for p in parts)
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def stable_rng(*parts) -> random.Random:
    return random.Random(derive_seed(*parts))
