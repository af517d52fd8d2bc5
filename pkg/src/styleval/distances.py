"""Directional style distances over embedding vectors.

Away measures how far a rewrite moved from its input; Towards measures
how close it landed to the target. Both map cosine similarity into [0, 1].
"""

from __future__ import annotations

import math
from typing import Sequence

from .errors import ZeroVector


def _cosine(a: Sequence[float], b: Sequence[float]) -> float:
    if len(a) != len(b):
        raise ValueError(f"vector lengths differ: {len(a)} vs {len(b)}")
    dot = sum(x * y for x, y in zip(a, b))
    norm_a = math.sqrt(sum(x * x for x in a))
    norm_b = math.sqrt(sum(y * y for y in b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroVector("cosine undefined for a zero vector")
    # round-off can push the ratio a hair outside [-1, 1]
    return max(-1.0, min(1.0, dot / (norm_a * norm_b)))


def away_towards(
    rewritten: Sequence[float],
    input_vec: Sequence[float],
    target: Sequence[float],
) -> tuple[float, float]:
    """away = (1 - cos(rewritten, input)) / 2; towards = (1 + cos(rewritten, target)) / 2."""
    away = (1.0 - _cosine(rewritten, input_vec)) / 2.0
    towards = (1.0 + _cosine(rewritten, target)) / 2.0
    return away, towards
