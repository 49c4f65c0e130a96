"""Window profiles and exhaustive verification of the counting arguments.

For a canonical family (a, b, k, m) and an M-avoiding window A containing
0, the upper-bound argument tracks three auxiliary sets, all determined by
A restricted to [0, n2):

  empty_translates  offsets alpha in [1, b-1] whose translate alpha + S
                    misses A entirely ("I");
  band_parts[i]     elements of A strictly inside the i-th inter-gap band
                    (i*a + b, (i+1)*a), for 0 <= i < k ("T_i");
  top_holes         positions of [k*a + (m+1)*b, (k+1)*a + m*b) missing
                    from A ("U").

Two exact counting identities hold for every avoiding window containing 0
(each translate alpha + S is a chain of forbidden differences, so it meets
A at most once, and [0, n1) splits into the b translates, the k bands, and
k landmark positions i*a + b that are themselves forbidden):

    |A intersect [0, n1)| = b - |I| + |T|
    |A intersect [0, n2)| = a - |U| - |I| + |T|

On top of the identities sit three checks, each quantified over every
avoiding window of [0, n2) containing 0:

  * the band-count inequality (k+m)|T| <= (k+m)|I| + k|U|, proved for
    k = 1 or m = 1 and otherwise conjectural (opt in via allow_conjecture);
  * a two-branch dichotomy bounding one of the two prefix counts by the
    matching closed-form numerator (requires r >= 1);
  * the short-prefix certificate (Haralambis): if every avoiding window
    containing 0 has |A intersect [0, n)| <= delta*n for some candidate n,
    then mu(M) <= delta.  Candidates here are {n1, n2}.  A counterexample
    window refutes only the certificate attempt, never the bound itself.

All comparisons against rational bounds are exact cross-multiplications;
windows of length n2 suffice because every quantity above only reads
positions below n2 (extending a window rightward never changes its
profile, a fact the tests exercise with randomized extensions).
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import InvalidInput, ResourceLimit, UnsupportedRegime, WindowTooShort
from .family import (
    CanonicalParams,
    DifferenceSet,
    as_difference_set,
    conjectured_density,
    defect,
    forbidden_differences,
    two_gap_set,
)
from .oracle import DEFAULT_ENUM_CAP, Window, enumerate_avoiding_windows

__all__ = [
    "Profile",
    "VerificationReport",
    "CertifyResult",
    "profile",
    "check_counting_identities",
    "check_main_inequality",
    "check_dichotomy",
    "haralambis_certify",
    "delta_certificate",
]


@dataclass(frozen=True, slots=True)
class Profile:
    """The auxiliary sets (I, T_0..T_{k-1}, U) of one window."""

    empty_translates: frozenset[int]
    band_parts: tuple[frozenset[int], ...]
    top_holes: frozenset[int]

    @property
    def band_all(self) -> frozenset[int]:
        out: frozenset[int] = frozenset()
        for part in self.band_parts:
            out |= part
        return out

    @property
    def sizes(self) -> tuple[int, int, int]:
        """(|I|, |T|, |U|)."""
        return (
            len(self.empty_translates),
            sum(len(p) for p in self.band_parts),
            len(self.top_holes),
        )


@dataclass(frozen=True, slots=True)
class VerificationReport:
    """Outcome of one exhaustive check over enumerated windows."""

    params: CanonicalParams
    windows_checked: int
    passed: bool
    counterexample: Window | None
    detail: str | None
    elapsed: float


@dataclass(frozen=True, slots=True)
class CertifyResult:
    """Outcome of a short-prefix certificate attempt for mu(M) <= delta."""

    certified: bool
    windows_checked: int
    counterexample: Window | None


def profile(window: Window, p: CanonicalParams) -> Profile:
    """Compute (I, T_i, U) for an M-avoiding window containing 0.

    The window must cover [0, n2); longer windows are fine, the extra
    positions are never read.
    """
    if window.length < p.n2:
        raise WindowTooShort(
            f"profile needs window length >= n2 = {p.n2}, got {window.length}"
        )
    a, b, k, m = p.a, p.b, p.k, p.m
    mask = window.mask
    s_mask = 0
    for s in two_gap_set(p):
        s_mask |= 1 << s
    translates = frozenset(
        alpha for alpha in range(1, b) if mask & (s_mask << alpha) == 0
    )
    bands = tuple(
        frozenset(x for x in range(i * a + b + 1, (i + 1) * a) if mask >> x & 1)
        for i in range(k)
    )
    holes = frozenset(
        x for x in range(k * a + (m + 1) * b, p.n2) if not mask >> x & 1
    )
    return Profile(empty_translates=translates, band_parts=bands, top_holes=holes)


def check_counting_identities(window: Window, p: CanonicalParams) -> bool:
    """Both exact prefix-count identities for one avoiding window with 0."""
    prof = profile(window, p)
    n_i, n_t, n_u = prof.sizes
    return (
        window.count_below(p.n1) == p.b - n_i + n_t
        and window.count_below(p.n2) == p.a - n_u - n_i + n_t
    )


def _enumerate(p: CanonicalParams, cap: int):
    M = forbidden_differences(p)
    return enumerate_avoiding_windows(M, p.n2, require_zero=True, cap=cap)


def check_main_inequality(
    p: CanonicalParams,
    *,
    allow_conjecture: bool = False,
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> VerificationReport:
    """(k+m)|T| <= (k+m)|I| + k|U| over every avoiding window with 0.

    Proved for k = 1 or m = 1; for k, m >= 2 the run must be requested with
    allow_conjecture=True, and a counterexample would refute only this
    inequality, not any established result.
    """
    if p.k >= 2 and p.m >= 2 and not allow_conjecture:
        raise UnsupportedRegime(
            f"k = {p.k}, m = {p.m}: the inequality is conjectural there; "
            "pass allow_conjecture=True to probe it anyway"
        )
    k, m = p.k, p.m
    t0 = time.perf_counter()
    count = 0
    for w in _enumerate(p, enum_cap):
        count += 1
        n_i, n_t, n_u = profile(w, p).sizes
        lhs = (k + m) * n_t
        rhs = (k + m) * n_i + k * n_u
        if lhs > rhs:
            return VerificationReport(
                params=p,
                windows_checked=count,
                passed=False,
                counterexample=w,
                detail=f"({k}+{m})*{n_t} = {lhs} > {rhs} = ({k}+{m})*{n_i} + {k}*{n_u}",
                elapsed=time.perf_counter() - t0,
            )
    return VerificationReport(
        params=p,
        windows_checked=count,
        passed=True,
        counterexample=None,
        detail=None,
        elapsed=time.perf_counter() - t0,
    )


def check_dichotomy(
    p: CanonicalParams,
    *,
    allow_conjecture: bool = False,
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> VerificationReport:
    """Every avoiding window satisfies one of the two prefix-count bounds.

    With d, r from the defect division and r >= 1, either

        b - |I| + |T|       <=  b + k*d        (1 <= r <= m)
                                a - (m+1)*(d+1)  (m+1 <= r <= k+m)
    or
        a - |U| - |I| + |T| <=  b + (k+1)*d    (1 <= r <= m)
                                a - m*(d+1)      (m+1 <= r <= k+m)

    By the counting identities the left sides are the two prefix counts, so
    this is the dichotomy behind the closed-form bound.  r = 0 is rejected:
    no dichotomy is formulated there.
    """
    if p.k >= 2 and p.m >= 2 and not allow_conjecture:
        raise UnsupportedRegime(
            f"k = {p.k}, m = {p.m}: conjectural regime; pass allow_conjecture=True"
        )
    d, r = defect(p)
    if r == 0:
        raise InvalidInput("r = 0: the dichotomy is not formulated for zero remainder")
    a, b, k, m = p.a, p.b, p.k, p.m
    if r <= m:
        bound1, bound2 = b + k * d, b + (k + 1) * d
    else:
        bound1, bound2 = a - (m + 1) * (d + 1), a - m * (d + 1)

    t0 = time.perf_counter()
    count = 0
    for w in _enumerate(p, enum_cap):
        count += 1
        n_i, n_t, n_u = profile(w, p).sizes
        first = b - n_i + n_t
        second = a - n_u - n_i + n_t
        if first > bound1 and second > bound2:
            return VerificationReport(
                params=p,
                windows_checked=count,
                passed=False,
                counterexample=w,
                detail=f"both {first} > {bound1} and {second} > {bound2}",
                elapsed=time.perf_counter() - t0,
            )
    return VerificationReport(
        params=p,
        windows_checked=count,
        passed=True,
        counterexample=None,
        detail=None,
        elapsed=time.perf_counter() - t0,
    )


def haralambis_certify(
    distances: DifferenceSet | Iterable[int],
    delta: Fraction,
    candidates: Iterable[int],
    *,
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> CertifyResult:
    """Certify mu(M) <= delta from short prefixes.

    If every M-avoiding window containing 0 satisfies
    |A intersect [0, n)| <= delta * n for at least one candidate n, then
    mu(M) <= delta (normalize any avoiding set to contain 0; its density is
    bounded by prefix averages).  A window defeating all candidates only
    means the certificate fails at these candidates; it proves nothing
    about mu(M).  The returned counterexample is the first one in the
    lexicographic enumeration order.

    Comparisons are exact: count * delta.den <= delta.num * n.
    """
    M = as_difference_set(distances)
    cand = sorted(set(int(n) for n in candidates))
    if not cand or cand[0] < 1:
        raise InvalidInput(f"candidates must be positive integers, got {candidates!r}")
    if not isinstance(delta, Fraction) or delta <= 0:
        raise InvalidInput(f"delta must be a positive Fraction, got {delta!r}")
    length = cand[-1]
    if length > enum_cap:
        raise ResourceLimit(f"candidate {length} exceeds enumeration cap {enum_cap}")
    num, den = delta.numerator, delta.denominator
    count = 0
    for w in enumerate_avoiding_windows(M, length, require_zero=True, cap=enum_cap):
        count += 1
        if all(w.count_below(n) * den > num * n for n in cand):
            return CertifyResult(certified=False, windows_checked=count, counterexample=w)
    return CertifyResult(certified=True, windows_checked=count, counterexample=None)


def delta_certificate(p: CanonicalParams, *, enum_cap: int = DEFAULT_ENUM_CAP) -> CertifyResult:
    """haralambis_certify at the family's own delta with candidates {n1, n2}."""
    breakdown = conjectured_density(p)
    return haralambis_certify(
        forbidden_differences(p), breakdown.delta, (p.n1, p.n2), enum_cap=enum_cap
    )
