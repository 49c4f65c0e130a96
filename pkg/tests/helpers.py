"""Shared test utilities: instance generators and independent brute forces.

The brute-force routines here deliberately use a different algorithm from
the package (itertools subset filtering instead of recursive pruning) so
that agreement between the two is meaningful.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations

from densitypack import CanonicalParams


def canonical_instances(
    *,
    max_weight: int | None = None,
    max_n2: int | None = None,
    proved_only: bool = False,
    max_a: int = 60,
    include_equal: bool = False,
):
    """Yield canonical families in lexicographic (a, b, k, m) order.

    Canonical means gcd(a, b) = 1 and b < a; include_equal adds the
    degenerate a = b = 1 family.  Filters: canonical weight k*a + m*b at
    most max_weight, window length n2 at most max_n2, and (optionally) the
    proved regime k = 1 or m = 1.
    """
    assert max_weight is not None or max_n2 is not None, "need a size bound"

    def fits(p: CanonicalParams) -> bool:
        if max_weight is not None and p.weight > max_weight:
            return False
        if max_n2 is not None and p.n2 > max_n2:
            return False
        return True

    for a in range(1, max_a + 1):
        for b in range(1, a + 1):
            if b == a and not (include_equal and a == 1):
                continue
            if math.gcd(a, b) != 1:
                continue
            k = 1
            while fits(CanonicalParams(a=a, b=b, k=k, m=1)):
                m = 1
                while fits(p := CanonicalParams(a=a, b=b, k=k, m=m)):
                    if not proved_only or k == 1 or m == 1:
                        yield p
                    m += 1
                k += 1


def brute_avoiding_masks(distances, n: int, require_zero: bool) -> list[int]:
    """All avoiding bitmasks over [0, n) by checking every subset shift."""
    M = tuple(distances)
    out = []
    for mask in range(1 << n):
        if require_zero and not mask & 1:
            continue
        if all(mask & (mask >> d) == 0 for d in M):
            out.append(mask)
    return out


def brute_max_prefix(distances, n: int, require_zero: bool) -> int:
    return max(mask.bit_count() for mask in brute_avoiding_masks(distances, n, require_zero))


def brute_best_periodic(distances, max_period: int):
    """(best density, (period, residues) witness) by raw subset search."""
    M = tuple(distances)
    best = Fraction(0)
    witness = None
    for p in range(1, max_period + 1):
        if any(d % p == 0 for d in M):
            continue
        for size in range(p, 0, -1):
            if Fraction(size, p) <= best:
                break
            found = None
            for combo in combinations(range(p), size):
                chosen = set(combo)
                if all((x + d) % p not in chosen for x in chosen for d in M):
                    found = combo
                    break
            if found:
                best = Fraction(size, p)
                witness = (p, found)
                break
    return best, witness
