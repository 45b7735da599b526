"""Seeded random primitives with a platform-independent stream.

Everything is built on ``random.Random.random()``, the one generator output
CPython guarantees to be reproducible for a given seed across versions and
platforms.  Integer draws, shuffles, and the continuous distributions are
derived from that uniform stream here (inverse-CDF / Box-Muller), so a seed
pins the full output byte-for-byte.
"""

from __future__ import annotations

import hashlib
import math
import random
from typing import Sequence, TypeVar

T = TypeVar("T")


def derive_seed(*parts: object) -> int:
    """Stable 64-bit child seed from a tuple of labels (seed, epoch, ...)."""
    text = "\x1f".join(repr(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


class SeededRng:
    """Deterministic RNG facade; one instance per worker, never shared."""

    def __init__(self, seed: int):
        self._seed = seed
        self._random = random.Random(seed).random

    @property
    def seed(self) -> int:
        return self._seed

    def random(self) -> float:
        return self._random()

    def randint(self, low: int, high: int) -> int:
        """Uniform integer in [low, high], both inclusive."""
        if high < low:
            raise ValueError(f"empty integer range [{low}, {high}]")
        return low + int(self._random() * (high - low + 1))

    def choice(self, seq: Sequence[T]) -> T:
        return seq[self.randint(0, len(seq) - 1)]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates on the pinned uniform stream."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(0, i)
            items[i], items[j] = items[j], items[i]

    def sample_indices(self, n: int, k: int) -> list[int]:
        """k distinct indices drawn uniformly from range(n), in draw order."""
        if not 0 <= k <= n:
            raise ValueError(f"cannot sample {k} of {n}")
        pool = list(range(n))
        out = []
        for i in range(k):
            j = self.randint(i, n - 1)
            pool[i], pool[j] = pool[j], pool[i]
            out.append(pool[i])
        return out

    def gauss01(self) -> float:
        """Standard normal via Box-Muller."""
        u1 = 1.0 - self._random()  # (0, 1]; keeps log() finite
        u2 = self._random()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
