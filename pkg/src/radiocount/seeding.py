"""Deterministic seed derivation.

All randomness in a run descends from one 64-bit master seed. Trial seeds
are derived as derive_seed(master, trial_index) and per-node generator
seeds as derive_seed(trial_seed, node_id), so any node of any trial can
be replayed in isolation.

The hash is fixed for the life of the on-disk formats: SHA-256 over the
ASCII tag "radiocount.v1" followed by each value as an unsigned 64-bit
little-endian integer, truncated to the first 8 digest bytes
(little-endian). Changing it invalidates recorded experiments.
"""

from __future__ import annotations

import hashlib
import random
import struct

_TAG = b"radiocount.v1"
_MASK64 = (1 << 64) - 1


def derive_seed(master: int, *indices: int) -> int:
    """Stable 64-bit seed from a master seed and an index path."""
    h = hashlib.sha256(_TAG)
    h.update(struct.pack("<Q", master & _MASK64))
    for v in indices:
        h.update(struct.pack("<Q", v & _MASK64))
    return int.from_bytes(h.digest()[:8], "little")


def node_rng(trial_seed: int, node_id: int) -> random.Random:
    """Independent generator for one node of one trial."""
    return random.Random(derive_seed(trial_seed, node_id))
