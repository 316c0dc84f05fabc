"""Deterministic, portable randomness.

All sampling in the toolkit goes through this module so that a given
64-bit seed produces byte-identical corpora on every platform. The
generator is the Mersenne Twister exposed by :mod:`random`, which CPython
documents as stable across versions for ``random()``/``getrandbits``;
ordering-sensitive helpers (sampling, choice) are implemented here with
explicit Fisher-Yates instead of relying on stdlib method internals.

Sub-seeds for indexed work items (e.g. the i-th form of a corpus) are
derived by hashing, so streams never overlap.
"""

from __future__ import annotations

import hashlib
import random

MASK64 = (1 << 64) - 1


def make_rng(seed: int) -> random.Random:
    return random.Random(seed & MASK64)


def derive_subseed(seed: int, *indices: int) -> int:
    """Stable sub-seed for work item ``indices`` under a master seed."""
    payload = ("%d:" % (seed & MASK64) + ":".join(str(i) for i in indices)).encode()
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")


def rand_below(rng: random.Random, n: int) -> int:
    """Uniform integer in [0, n) using only the stable getrandbits path."""
    if n <= 0:
        raise ValueError("rand_below needs n >= 1")
    k = n.bit_length()
    while True:
        r = rng.getrandbits(k)
        if r < n:
            return r


def rand_int(rng: random.Random, lo: int, hi: int) -> int:
    """Uniform integer in [lo, hi] inclusive."""
    return lo + rand_below(rng, hi - lo + 1)


def choose(rng: random.Random, items):
    return items[rand_below(rng, len(items))]


def sample_indices(rng: random.Random, n: int, k: int) -> list[int]:
    """k distinct indices from range(n), partial Fisher-Yates order."""
    if k > n:
        raise ValueError("cannot sample %d from %d" % (k, n))
    pool = list(range(n))
    for i in range(k):
        j = rand_int(rng, i, n - 1)
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:k]
