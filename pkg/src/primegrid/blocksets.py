"""Survivor sets of prime progressions inside one block.

A block [lo, hi) carries one arithmetic progression per prime q (the multiples
of q that land in the block).  A point is deleted when some point of a
*different* progression, also inside the block, lies within distance d of it.
Coincident points (a common multiple of two of the primes) are at distance 0
from each other and therefore die on both sides.

These functions are the single source of truth for block contents; the ledger
uses the counts while choosing block endpoints, and the sequence store uses
the element arrays.  A brute-force oracle in the test suite re-derives them
point by point.
"""

from __future__ import annotations

import numpy as np


def _progression_points(q: int, lo: int, hi: int) -> np.ndarray:
    """Multiples of q in [lo, hi) as an int64 array."""
    if hi <= lo:
        return np.empty(0, dtype=np.int64)
    start = -(-lo // q) * q
    return np.arange(start, hi, q, dtype=np.int64)


def survivors_by_progression(
    primes, d: int, lo: int, hi: int
) -> tuple[list[np.ndarray], list[int]]:
    """Per-progression survivors and deletion counts for the block [lo, hi).

    Returns (survivor arrays indexed like `primes`, deleted counts per index).
    """
    primes = list(primes)
    if len(set(primes)) != len(primes):
        raise ValueError("progression moduli must be distinct")
    survivors = []
    deleted = []
    for j, q in enumerate(primes):
        pts = _progression_points(q, lo, hi)
        keep = np.ones(len(pts), dtype=bool)
        for jp, qp in enumerate(primes):
            if jp == j:
                continue
            r = pts % qp
            below = (r <= d) & (pts - r >= lo)
            up = qp - r
            above = (up <= d) & (pts + up < hi)
            keep &= ~(below | above)
        survivors.append(pts[keep])
        deleted.append(int(len(pts) - keep.sum()))
    return survivors, deleted


def block_elements(primes, d: int, lo: int, hi: int) -> np.ndarray:
    """Sorted survivor set of the block [lo, hi)."""
    per_j, _ = survivors_by_progression(primes, d, lo, hi)
    if not per_j:
        return np.empty(0, dtype=np.int64)
    return np.unique(np.concatenate(per_j))


def block_count(primes, d: int, lo: int, hi: int) -> int:
    """Number of survivors in [lo, hi)."""
    return int(block_elements(primes, d, lo, hi).size)
