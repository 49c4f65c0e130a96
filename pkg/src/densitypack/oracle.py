"""Exact optimal-density oracle for difference-avoiding integer sets.

Given a finite set M of forbidden positive differences, mu(M) is the
maximal (upper) density of a set A of integers with (A - A) disjoint from
M.  This module computes mu(M) exactly by the standard reduction to a
maximum mean cycle:

  * vertices are the M-avoiding 0/1 windows of length L = max(M)
    (bit j of a state is membership of the j-th oldest position);
  * appending a new position shifts the window by one; appending a set
    position is allowed iff no earlier position at distance d in M is set,
    which is a single AND against a precomputed conflict mask since all
    d <= L;
  * edge weight is the appended bit.

Every periodic avoiding set walks a cycle of this graph with mean equal to
its density, and conversely any cycle unrolls into a periodic avoiding set,
so mu(M) is the maximum cycle mean.  The graph is strongly connected (the
all-zero window reaches and is reached by every state), every state has an
out-edge (appending 0) and an in-edge, and the optimum is a fraction with
denominator at most the state count.

Two exact solvers are provided: Karp's recurrence (integer arithmetic,
vectorized with numpy, used up to 2**16 states) and Howard policy iteration
over Fraction-valued gains and biases (used above that, or on request).
Witnesses come from a zero-weight cycle of the reweighted graph
w' = den*w - num, found among the tight edges of a longest-walk potential.

A third, entirely independent route -- exhaustive search over periodic sets
of bounded period -- lives in `best_periodic_density` and exists to
cross-examine the mean-cycle answer in tests.

Resource guards: max(M) must stay within a window cap (default 22), the
admissible-state count within a state cap (default 2**22, overridable via
the DENSITYPACK_MAX_STATES environment variable), and window enumeration
length within an enumeration cap (default 26).  Exceeding any raises
ResourceLimit.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

from .errors import InvalidInput, ResourceLimit
from .family import DifferenceSet, as_difference_set

__all__ = [
    "Window",
    "PeriodicSet",
    "ExactDensity",
    "DEFAULT_WINDOW_CAP",
    "DEFAULT_ENUM_CAP",
    "DEFAULT_STATE_CAP",
    "STATE_CAP_ENV",
    "KARP_STATE_LIMIT",
    "mu_exact",
    "best_periodic_density",
    "check_periodic_avoiding",
    "enumerate_avoiding_windows",
    "max_prefix_weight",
    "window_avoids",
]

DEFAULT_WINDOW_CAP = 22
DEFAULT_ENUM_CAP = 26
DEFAULT_STATE_CAP = 1 << 22
STATE_CAP_ENV = "DENSITYPACK_MAX_STATES"
KARP_STATE_LIMIT = 1 << 16


@dataclass(frozen=True, slots=True)
class Window:
    """A finite 0/1 window over positions [0, length).  Bit i <=> i in the set."""

    length: int
    mask: int

    def __post_init__(self):
        if self.length < 1:
            raise InvalidInput(f"window length must be >= 1, got {self.length}")
        if self.mask < 0 or self.mask >> self.length:
            raise InvalidInput("window mask has bits outside [0, length)")

    @classmethod
    def from_members(cls, length: int, members: Iterable[int]) -> "Window":
        mask = 0
        for x in members:
            if not 0 <= x < length:
                raise InvalidInput(f"member {x} outside [0, {length})")
            mask |= 1 << x
        return cls(length, mask)

    def members(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.length) if self.mask >> i & 1)

    def __contains__(self, x: object) -> bool:
        return isinstance(x, int) and 0 <= x < self.length and bool(self.mask >> x & 1)

    def count_below(self, n: int) -> int:
        """|A intersect [0, n)| for n up to the window length."""
        n = min(n, self.length)
        return (self.mask & ((1 << n) - 1)).bit_count()

    def __repr__(self) -> str:  # keep pytest failure output readable
        return f"Window({self.length}, {{{', '.join(map(str, self.members()))}}})"


@dataclass(frozen=True, slots=True)
class PeriodicSet:
    """The periodic set {x + t*period : x in residues, t in Z}."""

    period: int
    residues: tuple[int, ...]

    def __post_init__(self):
        if self.period < 1:
            raise InvalidInput(f"period must be >= 1, got {self.period}")
        prev = -1
        for x in self.residues:
            if not isinstance(x, int) or not 0 <= x < self.period or x <= prev:
                raise InvalidInput(
                    f"residues must be strictly increasing in [0, period), got {self.residues}"
                )
            prev = x

    def density(self) -> Fraction:
        return Fraction(len(self.residues), self.period)


@dataclass(frozen=True, slots=True)
class ExactDensity:
    """mu(M) with a periodic witness attaining it."""

    value: Fraction
    witness: PeriodicSet
    states_explored: int
    method: str


def check_periodic_avoiding(s: PeriodicSet, distances: DifferenceSet | Iterable[int]) -> bool:
    """Whether the periodic set avoids every difference in M (checked mod period)."""
    M = as_difference_set(distances)
    residues = set(s.residues)
    for d in M:
        dm = d % s.period
        if any((x + dm) % s.period in residues for x in residues):
            return False
    return True


def window_avoids(window: Window, distances: DifferenceSet | Iterable[int]) -> bool:
    """Whether no two members of the window differ by an element of M."""
    M = as_difference_set(distances)
    return all(window.mask & (window.mask >> d) == 0 for d in M)


def _conflict_masks(M: DifferenceSet, n: int) -> list[int]:
    """masks[t] has bit t-d for each d in M with d <= t: earlier positions
    that forbid setting position t."""
    masks = [0] * n
    for t in range(n):
        cm = 0
        for d in M:
            if d > t:
                break
            cm |= 1 << (t - d)
        masks[t] = cm
    return masks


def _iter_avoiding_masks(M: DifferenceSet, n: int, require_zero: bool) -> Iterator[int]:
    """All M-avoiding bitmasks over [0, n), in lexicographic order of the
    bit string b_0 b_1 ... b_{n-1} (excluding a position sorts first)."""
    conflicts = _conflict_masks(M, n)

    def rec(pos: int, mask: int) -> Iterator[int]:
        if pos == n:
            yield mask
            return
        yield from rec(pos + 1, mask)
        if mask & conflicts[pos] == 0:
            yield from rec(pos + 1, mask | (1 << pos))

    start_mask = 1 if require_zero else 0
    yield from rec(1 if require_zero else 0, start_mask)


def enumerate_avoiding_windows(
    distances: DifferenceSet | Iterable[int],
    n: int,
    require_zero: bool = True,
    *,
    cap: int = DEFAULT_ENUM_CAP,
) -> Iterator[Window]:
    """Yield every M-avoiding window over [0, n), each exactly once.

    Order is lexicographic by bit pattern, so reported counterexamples are
    reproducible minima.  n is limited by `cap` because the count grows
    exponentially.
    """
    M = as_difference_set(distances)
    if n < 1:
        raise InvalidInput(f"window length must be >= 1, got {n}")
    if n > cap:
        raise ResourceLimit(f"window length {n} exceeds enumeration cap {cap}")
    for mask in _iter_avoiding_masks(M, n, require_zero):
        yield Window(n, mask)


def max_prefix_weight(
    distances: DifferenceSet | Iterable[int],
    n: int,
    require_zero: bool = True,
    *,
    cap: int = DEFAULT_ENUM_CAP,
) -> int:
    """max |A intersect [0, n)| over M-avoiding A (0 in A if require_zero).

    Depth-first with include-first ordering and the trivial remaining-slots
    bound, which prunes hard once a good set is known.
    """
    M = as_difference_set(distances)
    if n < 1:
        raise InvalidInput(f"window length must be >= 1, got {n}")
    if n > cap:
        raise ResourceLimit(f"window length {n} exceeds enumeration cap {cap}")
    conflicts = _conflict_masks(M, n)
    best = 0

    def rec(pos: int, mask: int, cnt: int) -> None:
        nonlocal best
        if cnt + (n - pos) <= best:
            return
        if pos == n:
            best = cnt
            return
        if mask & conflicts[pos] == 0:
            rec(pos + 1, mask | (1 << pos), cnt + 1)
        rec(pos + 1, mask, cnt)

    if require_zero:
        rec(1, 1, 1)
    else:
        rec(0, 0, 0)
    return best


# ──────────────────────────────────────────────────────────────────────────
# mean-cycle oracle
# ──────────────────────────────────────────────────────────────────────────


def _state_cap(max_states: int | None) -> int:
    if max_states is not None:
        return max_states
    env = os.environ.get(STATE_CAP_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise InvalidInput(f"{STATE_CAP_ENV} must be an integer, got {env!r}") from exc
    return DEFAULT_STATE_CAP


def _build_state_graph(M: DifferenceSet, cap: int):
    """Enumerate avoiding windows of length L = max(M) and their shift edges.

    Returns (states, index, edges) where edges is a list of (src, dst, bit).
    """
    L = M.max_element
    states: list[int] = []
    for mask in _iter_avoiding_masks(M, L, require_zero=False):
        states.append(mask)
        if len(states) > cap:
            raise ResourceLimit(
                f"admissible state count exceeds cap {cap} "
                f"(set {STATE_CAP_ENV} or max_states to raise it)"
            )
    index = {mask: i for i, mask in enumerate(states)}
    top = 1 << (L - 1)
    # Appending position p conflicts with p - d, i.e. bit L - d of the old window.
    append_conflicts = 0
    for d in M:
        append_conflicts |= 1 << (L - d)

    edges: list[tuple[int, int, int]] = []
    for i, mask in enumerate(states):
        shifted = mask >> 1
        edges.append((i, index[shifted], 0))
        if mask & append_conflicts == 0:
            edges.append((i, index[shifted | top], 1))
    return states, index, edges


def _karp_max_mean(n_states: int, edges, source: int) -> Fraction:
    """Maximum cycle mean by Karp's recurrence, exact in int64.

    F_i(v) = max weight of an i-edge walk source -> v; the answer is
    max_v min_j (F_n(v) - F_j(v)) / (n - j).  Runs two relaxation sweeps to
    keep memory at O(V): one to obtain F_n, one re-deriving each F_j while
    maintaining the running minimum ratio per vertex by cross-multiplication
    (all quantities fit easily in int64 for n <= 2**16).
    """
    n = n_states
    src = np.fromiter((e[0] for e in edges), dtype=np.int64, count=len(edges))
    dst = np.fromiter((e[1] for e in edges), dtype=np.int64, count=len(edges))
    wgt = np.fromiter((e[2] for e in edges), dtype=np.int64, count=len(edges))
    order = np.argsort(dst, kind="stable")
    src, dst, wgt = src[order], dst[order], wgt[order]
    counts = np.bincount(dst, minlength=n)
    assert counts.min() > 0  # every avoiding window has a shift predecessor
    starts = np.zeros(n, dtype=np.int64)
    np.cumsum(counts[:-1], out=starts[1:])

    NEG = np.int64(-(1 << 50))
    NEG_THRESH = NEG // 2

    def relax(F):
        return np.maximum.reduceat(F[src] + wgt, starts)

    F = np.full(n, NEG, dtype=np.int64)
    F[source] = 0
    for _ in range(n):
        F = relax(F)
    F_final = F
    assert F_final.min() > NEG_THRESH  # strong connectivity: all reachable

    best_num = np.ones(n, dtype=np.int64)
    best_den = np.zeros(n, dtype=np.int64)  # num/den = +infinity until first hit
    G = np.full(n, NEG, dtype=np.int64)
    G[source] = 0
    for j in range(n):
        if j > 0:
            G = relax(G)
        valid = G > NEG_THRESH
        num = np.where(valid, F_final - G, 0)
        den = n - j
        better = valid & (num * best_den < best_num * den)
        best_num = np.where(better, num, best_num)
        best_den = np.where(better, den, best_den)
    assert best_den.min() > 0

    best = Fraction(int(best_num[0]), int(best_den[0]))
    for v in range(1, n):
        cand = Fraction(int(best_num[v]), int(best_den[v]))
        if cand > best:
            best = cand
    return best


def _tight_cycle(n_states: int, states, edges, value: Fraction, L: int):
    """Extract an optimal cycle as a periodic witness.

    With w' = den*w - num the maximum cycle mean becomes 0, so the
    longest-walk potential pi (fixpoint of pi <- max(pi, relax(pi)) from 0)
    is finite, and every optimal cycle consists of tight edges
    pi[u] + w' = pi[v].  Any cycle of the tight subgraph telescopes to
    w'-weight 0, i.e. is optimal, so a depth-first search for any cycle
    suffices.
    """
    num, den = value.numerator, value.denominator
    src = np.fromiter((e[0] for e in edges), dtype=np.int64, count=len(edges))
    dst = np.fromiter((e[1] for e in edges), dtype=np.int64, count=len(edges))
    wgt = np.fromiter((e[2] for e in edges), dtype=np.int64, count=len(edges))
    order = np.argsort(dst, kind="stable")
    src, dst, wgt = src[order], dst[order], wgt[order]
    w2 = wgt * den - num
    counts = np.bincount(dst, minlength=n_states)
    starts = np.zeros(n_states, dtype=np.int64)
    np.cumsum(counts[:-1], out=starts[1:])

    pi = np.zeros(n_states, dtype=np.int64)
    for _ in range(n_states + 1):
        nxt = np.maximum(pi, np.maximum.reduceat(pi[src] + w2, starts))
        if np.array_equal(nxt, pi):
            break
        pi = nxt
    else:
        raise AssertionError("longest-walk potential failed to converge")

    tight = pi[src] + w2 == pi[dst]
    adj: list[list[int]] = [[] for _ in range(n_states)]
    for e in np.flatnonzero(tight):
        adj[int(src[e])].append(int(dst[e]))

    color = bytearray(n_states)  # 0 new, 1 on stack, 2 done
    pos: dict[int, int] = {}
    for root in range(n_states):
        if color[root]:
            continue
        path: list[int] = []
        stack: list[tuple[int, int]] = [(root, 0)]
        color[root] = 1
        pos[root] = 0
        path.append(root)
        while stack:
            v, i = stack.pop()
            if i < len(adj[v]):
                stack.append((v, i + 1))
                u = adj[v][i]
                if color[u] == 1:
                    cycle = path[pos[u] :]
                    bits = []
                    c = len(cycle)
                    for t in range(c):
                        nxt_state = states[cycle[(t + 1) % c]]
                        bits.append(nxt_state >> (L - 1) & 1)
                    return cycle, bits
                if color[u] == 0:
                    color[u] = 1
                    pos[u] = len(path)
                    path.append(u)
                    stack.append((u, 0))
            else:
                color[v] = 2
                del pos[v]
                path.pop()
    raise AssertionError("tight subgraph contained no cycle")


def _howard_max_mean(n_states: int, edges) -> tuple[Fraction, list[int]]:
    """Howard policy iteration for the maximum cycle mean, exact Fractions.

    Returns (value, cycle) where cycle is a vertex list of an optimal cycle.
    Gains and biases are evaluated on the policy's functional graph; the
    improvement step is the usual two-stage lexicographic one (gain first,
    then bias), switching only on strict improvement so termination is
    guaranteed.
    """
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n_states)]
    for s, t, w in edges:
        adj[s].append((t, w))

    # start from the greedy policy: take a weight-1 edge when available
    policy = [0] * n_states
    for v in range(n_states):
        for i, (_, w) in enumerate(adj[v]):
            if w == 1:
                policy[v] = i
                break

    zero = Fraction(0)
    for _ in range(100_000):
        succ = [adj[v][policy[v]][0] for v in range(n_states)]
        wsel = [adj[v][policy[v]][1] for v in range(n_states)]
        gain: list[Fraction | None] = [None] * n_states
        bias: list[Fraction | None] = [None] * n_states
        color = bytearray(n_states)
        for v0 in range(n_states):
            if color[v0]:
                continue
            path = []
            v = v0
            while color[v] == 0:
                color[v] = 1
                path.append(v)
                v = succ[v]
            if color[v] == 1:
                at = path.index(v)
                cycle = path[at:]
                lam = Fraction(sum(wsel[u] for u in cycle), len(cycle))
                bias[cycle[0]] = zero
                gain[cycle[0]] = lam
                for i in range(len(cycle) - 1, 0, -1):
                    u = cycle[i]
                    gain[u] = lam
                    bias[u] = wsel[u] - lam + bias[succ[u]]
                head = path[:at]
            else:
                head = path
            for u in reversed(head):
                gain[u] = gain[succ[u]]
                bias[u] = wsel[u] - gain[u] + bias[succ[u]]
            for u in path:
                color[u] = 2

        changed = False
        for v in range(n_states):
            gv = gain[v]
            best_gain = max(gain[t] for t, _ in adj[v])
            if best_gain > gv:
                for i, (t, _) in enumerate(adj[v]):
                    if gain[t] == best_gain:
                        policy[v] = i
                        break
                changed = True
                continue
            cur = bias[v]
            best_i, best_val = None, cur
            for i, (t, w) in enumerate(adj[v]):
                if gain[t] == gv:
                    val = w - gv + bias[t]
                    if val > best_val:
                        best_i, best_val = i, val
            if best_i is not None:
                policy[v] = best_i
                changed = True

        if not changed:
            v = max(range(n_states), key=lambda u: gain[u])
            seen = {}
            walk = []
            while v not in seen:
                seen[v] = len(walk)
                walk.append(v)
                v = succ[v]
            cycle = walk[seen[v] :]
            return gain[cycle[0]], cycle
    raise AssertionError("policy iteration failed to converge")


def mu_exact(
    distances: DifferenceSet | Iterable[int],
    *,
    max_window: int = DEFAULT_WINDOW_CAP,
    max_states: int | None = None,
    method: str = "auto",
) -> ExactDensity:
    """Exact mu(M) with a periodic witness.

    method is "auto" (Karp up to 2**16 states, policy iteration above),
    "karp", or "policy".  Raises ResourceLimit when max(M) exceeds
    `max_window` or the admissible state count exceeds the state cap.
    """
    M = as_difference_set(distances)
    L = M.max_element
    if L > max_window:
        raise ResourceLimit(f"max(M) = {L} exceeds window cap {max_window}")
    if method not in ("auto", "karp", "policy"):
        raise InvalidInput(f"unknown method {method!r}")

    states, index, edges = _build_state_graph(M, _state_cap(max_states))
    n = len(states)
    if method == "auto":
        method = "karp" if n <= KARP_STATE_LIMIT else "policy"

    if method == "karp":
        value = _karp_max_mean(n, edges, index[0])
        cycle, bits = _tight_cycle(n, states, edges, value, L)
        method_name = "Karp"
    else:
        value, cycle = _howard_max_mean(n, edges)
        bits = [states[cycle[(t + 1) % len(cycle)]] >> (L - 1) & 1 for t in range(len(cycle))]
        method_name = "PolicyIteration"

    witness = PeriodicSet(
        period=len(bits), residues=tuple(t for t, bit in enumerate(bits) if bit)
    )
    assert witness.density() == value
    assert check_periodic_avoiding(witness, M)
    return ExactDensity(
        value=value, witness=witness, states_explored=n, method=method_name
    )


def best_periodic_density(
    distances: DifferenceSet | Iterable[int], max_period: int
) -> ExactDensity:
    """Best density over periodic avoiding sets with period <= max_period.

    Independent of the mean-cycle machinery: for each period p this is a
    branch-and-bound maximum independent set in the circulant graph on Z_p
    with connection set M mod p.  Any d divisible by p empties that period.
    Always a lower bound for mu(M); equality is a property the tests probe,
    not something this function assumes.
    """
    M = as_difference_set(distances)
    if max_period < 1:
        raise InvalidInput(f"max_period must be >= 1, got {max_period}")
    best = Fraction(0)
    best_set: PeriodicSet | None = None
    for p in range(1, max_period + 1):
        if any(d % p == 0 for d in M):
            continue
        blocked_by = []
        for x in range(p):
            bl = 0
            for d in M:
                bl |= 1 << ((x + d) % p)
                bl |= 1 << ((x - d) % p)
            blocked_by.append(bl)

        best_cnt = 0
        best_res: tuple[int, ...] = ()

        # Every nonempty avoiding residue set has a rotation through 0.
        def rec(pos: int, chosen: tuple[int, ...], blocked: int) -> None:
            nonlocal best_cnt, best_res
            if len(chosen) + (p - pos) <= best_cnt:
                return
            if pos == p:
                best_cnt, best_res = len(chosen), chosen
                return
            if not blocked >> pos & 1:
                rec(pos + 1, chosen + (pos,), blocked | blocked_by[pos])
            rec(pos + 1, chosen, blocked)

        rec(1, (0,), blocked_by[0])
        if best_cnt and Fraction(best_cnt, p) > best:
            best = Fraction(best_cnt, p)
            best_set = PeriodicSet(period=p, residues=best_res)
    if best_set is None:
        raise InvalidInput(
            f"every period up to {max_period} divides some element of {tuple(M)}"
        )
    assert check_periodic_avoiding(best_set, M)
    return ExactDensity(
        value=best, witness=best_set, states_explored=max_period, method="PeriodicSearch"
    )
