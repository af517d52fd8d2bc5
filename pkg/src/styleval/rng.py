"""Deterministic random-number generation for reproducible experiment plans.

Uses the SplitMix64 generator: tiny state, full 64-bit output, identical
sequences on every platform. All sampling helpers are built on rejection
sampling so results do not depend on floating-point rounding.
"""

from __future__ import annotations

from typing import Sequence, TypeVar

MASK64 = (1 << 64) - 1

T = TypeVar("T")


class SplitMix64:
    """SplitMix64 PRNG (Steele, Lea, Flood 2014)."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) via rejection sampling."""
        if n <= 0:
            raise ValueError("randbelow needs a positive bound")
        limit = MASK64 - (MASK64 + 1) % n
        while True:
            x = self.next_u64()
            if x <= limit:
                return x % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample(self, items: Sequence[T], k: int) -> list[T]:
        """k distinct elements drawn without replacement, order randomized."""
        if k > len(items):
            raise ValueError(f"sample size {k} exceeds population {len(items)}")
        pool = list(items)
        self.shuffle(pool)
        return pool[:k]

    def choice(self, items: Sequence[T]) -> T:
        if not items:
            raise ValueError("choice from empty sequence")
        return items[self.randbelow(len(items))]


def derive_seed(root_seed: int, *labels: str | int) -> int:
    """Derive a stream seed from a root seed and a label path.

    Feeds each label through the generator so that distinct paths produce
    uncorrelated streams while staying reproducible from the root alone.
    """
    g = SplitMix64(root_seed)
    h = g.next_u64()
    for label in labels:
        data = str(label).encode("utf-8")
        for b in data:
            h = (h ^ b) & MASK64
            h = SplitMix64(h).next_u64()
        h = (h ^ 0xA5A5A5A5A5A5A5A5) & MASK64
        h = SplitMix64(h).next_u64()
    return h
