"""Primality testing and prime-window selection.

Deterministic Miller-Rabin with a fixed witness set, correct for all inputs
below 3.3 * 10^24 (comfortably covers the 64-bit range this package needs).
"""

from __future__ import annotations

_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for w in _WITNESSES:
        if n == w:
            return True
        if n % w == 0:
            return False
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than n."""
    k = n + 1
    if k <= 2:
        return 2
    if k % 2 == 0:
        k += 1
    while not is_prime(k):
        k += 2
    return k


def consecutive_primes(start: int, count: int) -> list[int]:
    """The first `count` primes >= start."""
    out = []
    k = start - 1
    while len(out) < count:
        k = next_prime(k)
        out.append(k)
    return out
