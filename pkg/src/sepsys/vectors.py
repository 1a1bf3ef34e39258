"""Enumeration of binary row vectors by weight."""

from __future__ import annotations

from itertools import islice
from typing import Iterator


def weight_class(m: int, w: int) -> Iterator[int]:
    """All ``m``-bit vectors of weight ``w`` in colexicographic (ascending int) order."""
    if w < 0 or w > m:
        return
    if w == 0:
        yield 0
        return
    x = (1 << w) - 1
    limit = 1 << m
    while x < limit:
        yield x
        # Gosper's hack: next int with the same popcount
        c = x & -x
        r = x + c
        x = (((r ^ x) >> 2) // c) | r


def by_weight(m: int, start_weight: int = 0) -> Iterator[int]:
    """Every ``m``-bit vector, ascending weight then colexicographic."""
    for w in range(start_weight, m + 1):
        yield from weight_class(m, w)


def first_vectors(m: int, count: int, start_weight: int = 0) -> list[int]:
    out = list(islice(by_weight(m, start_weight), count))
    if len(out) < count:
        raise ValueError(f"only {len(out)} vectors of weight >= {start_weight} exist in {m} columns")
    return out


def log2_ceil(n: int) -> int:
    """Exact ``ceil(log2 n)`` for ``n >= 1`` (0 for ``n <= 1``)."""
    return (n - 1).bit_length() if n > 1 else 0
