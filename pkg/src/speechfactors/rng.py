"""Seeded random number generation shared by every generative step.

All randomness in this package flows through one pinned generator (PCG64)
so that corpora are byte-reproducible across runs, platforms, and worker
scheduling. Per-utterance seeds are derived from a master seed and a
stable hash of the utterance id, which makes parallel corpus generation
order-independent.
"""

from __future__ import annotations

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1


def make_rng(seed: int) -> np.random.Generator:
    """Return the pinned deterministic generator for a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(seed & MASK64))


def stable_hash64(text: str) -> int:
    """Stable 64-bit hash of a string (first 8 bytes of BLAKE2b, little-endian).

    Unlike builtin ``hash``, this does not vary across processes or runs.
    """
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def utterance_seed(master_seed: int, utterance_id: str) -> int:
    """Per-utterance seed: ``master_seed XOR stable_hash64(utterance_id)``."""
    return (master_seed ^ stable_hash64(utterance_id)) & MASK64


def child_seeds(rng: np.random.Generator, n: int) -> list[int]:
    """Draw ``n`` independent 64-bit seeds from an existing stream."""
    return [int(x) for x in rng.integers(0, 1 << 64, size=n, dtype=np.uint64)]


def fisher_yates(items: list, rng: np.random.Generator) -> list:
    """Uniform in-place Fisher-Yates shuffle driven by ``rng``.

    Draw order is pinned: for i = n-1 .. 1, one integer j in [0, i] is
    drawn and items[i], items[j] are swapped. Golden tests replay this
    exact stream.
    """
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        out[i], out[j] = out[j], out[i]
    return out
