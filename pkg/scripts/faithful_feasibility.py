#!/usr/bin/env python3
"""Probe how far the literal constants let the construction go.

Prints the first two blocks and the exact prime-count requirement that stops
block 3, then scans how the requirement scales with the first endpoint.
"""

import sys

from primegrid.ledger import InfeasibleAtScale, build_ledger, extend_ledger


def main() -> int:
    led = build_ledger("faithful", 2)
    for b in led.blocks:
        print(f"block {b.m}: primes {b.primes}, period {b.p}, "
              f"endpoints [{b.beta_prev}, {b.beta}), gamma {b.gamma}")
    try:
        extend_ledger(led)
    except InfeasibleAtScale as exc:
        print(f"block 3 needs at least {exc.required:,} primes "
              f"({exc.required:.3e}); the demo profile exists for a reason")
        return 0
    print("unexpected: block 3 extended", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
