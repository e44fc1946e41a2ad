"""Lower-bound request generators.

Adaptive adversaries look at the online algorithm's current permutation and
return the next request. Each one also knows a cheap offline solution for
the sequence it produced (``offline_solution``), which the harness uses as
the "scheduled" benchmark.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import (
    CostLedger,
    InvalidInputError,
    Permutation,
    RequestSet,
    Trace,
    access_cost,
    kendall_tau,
    move_to_front,
)


def pad_request(p: Permutation, elements, r: int) -> RequestSet:
    """Fill a request up to size r with the last unrequested elements of ``p``."""
    chosen = list(dict.fromkeys(elements))
    for e in reversed(p.order):
        if len(chosen) >= r:
            break
        if e not in chosen:
            chosen.append(e)
    return RequestSet.of(chosen, p.n)


def static_ledger(p: Permutation, sets) -> CostLedger:
    ledger = CostLedger()
    for s in sets:
        ledger.record(access_cost(p, s), 0)
    return ledger


class Adversary:
    name = "adversary"

    def __init__(self, n: int, r: int):
        if not 1 <= r <= n:
            raise InvalidInputError(f"need 1 <= r <= n, got n={n} r={r}")
        self.n = n
        self.r = r
        self.t = 0

    def next_request(self, current: Permutation) -> RequestSet:
        s = self._emit(current)
        self.t += 1
        return s

    def _emit(self, current: Permutation) -> RequestSet:
        raise NotImplementedError

    def offline_solution(self, trace: Trace, initial: Permutation) -> CostLedger | None:
        """Ledger of the construction's own offline solution, if it has one."""
        return None


class LastR(Adversary):
    """Request the r last elements of the online permutation."""

    name = "last_r"

    def _emit(self, current):
        return RequestSet.of(current.order[self.n - self.r:], self.n)

    def offline_solution(self, trace, initial):
        from .oracles import greedy_static

        return static_ledger(greedy_static(trace), trace.sets)


def last_r(current: Permutation, r: int) -> RequestSet:
    return LastR(current.n, r).next_request(current)


class FixedPlusLast(Adversary):
    """Request a fixed element together with the last other element of the list."""

    name = "fixed_plus_last"

    def __init__(self, n, r=2, fixed: int = 1):
        super().__init__(n, r)
        if r < 2:
            raise InvalidInputError("fixed_plus_last needs r >= 2")
        if not 1 <= fixed <= n:
            raise InvalidInputError(f"fixed element {fixed} outside 1..{n}")
        self.fixed = fixed

    def _emit(self, current):
        last = next(e for e in reversed(current.order) if e != self.fixed)
        return pad_request(current, [self.fixed, last], self.r)

    def offline_solution(self, trace, initial):
        return static_ledger(move_to_front(Permutation.identity(self.n), [self.fixed]), trace.sets)


def fixed_plus_last(current: Permutation, fixed: int, r: int = 2) -> RequestSet:
    return FixedPlusLast(current.n, r, fixed).next_request(current)


class RelativeBad(Adversary):
    """Request the last element and the one at position floor(n / c) - 1."""

    name = "relative_bad"

    def __init__(self, n, r=2, c: float = 2):
        super().__init__(n, r)
        if r < 2:
            raise InvalidInputError("relative_bad needs r >= 2")
        self.c = c
        self.position = math.floor(n / c) - 1
        if not 1 <= self.position < n:
            raise InvalidInputError(f"position floor(n/c) - 1 = {self.position} out of range for n={n}")

    def _emit(self, current):
        return pad_request(current, [current.at(self.position), current.at(self.n)], self.r)

    def offline_solution(self, trace, initial):
        common = set(range(1, self.n + 1))
        for s in trace.sets:
            common &= set(s.elements)
        if not common:
            return None
        return static_ledger(move_to_front(Permutation.identity(self.n), [min(common)]), trace.sets)


def relative_bad(current: Permutation, c: float = 2, r: int = 2) -> RequestSet:
    return RelativeBad(current.n, r, c).next_request(current)


class CountBad(Adversary):
    """Frequency trap for MTF_count, with b = sqrt(n).

    Elements x_1..x_n are labelled by the initial permutation. A phase first
    pairs x_1 with each of x_2..x_{n-b}, then pairs x_{n-b+i} (i = 1..b) with
    whatever element currently sits at position n - b.
    """

    name = "count_bad"

    def __init__(self, n, r=2, initial: Permutation | None = None):
        super().__init__(n, r)
        b = math.isqrt(n)
        if b * b != n or b < 2:
            raise InvalidInputError(f"count_bad needs n = b*b with b >= 2, got n={n}")
        if r < 2:
            raise InvalidInputError("count_bad needs r >= 2")
        self.b = b
        self.x = (initial or Permutation.identity(n)).order
        self.phase_length = (n - b - 1) + b

    def _emit(self, current):
        n, b, x = self.n, self.b, self.x
        i = self.t % self.phase_length
        if i < n - b - 1:
            pair = [x[0], x[i + 1]]
        else:
            pair = [current.at(n - b), x[n - b + (i - (n - b - 1))]]
        return pad_request(current, pair, self.r)

    def cover_permutation(self) -> Permutation:
        n, b, x = self.n, self.b, self.x
        return move_to_front(Permutation(x), [x[0], *x[n - b:]])

    def offline_solution(self, trace, initial):
        return static_ledger(self.cover_permutation(), trace.sets)


@dataclass
class DynamicLBSchedule:
    """Bookkeeping for the MAE dynamic lower bound.

    ``pivots`` holds one entry per round; ``cover`` the pivot serving each
    request. ``important`` are the 2k elements of blocks 2 and k+2 of the
    initial permutation.
    """

    k: int
    r: int
    n: int
    important: tuple[int, ...]
    pivots: list[int] = field(default_factory=list)
    cover: list[int] = field(default_factory=list)

    @property
    def requests_per_round(self) -> int:
        return self.k + 1

    @property
    def requests_per_phase(self) -> int:
        return self.k * (self.k + 1)


def block_positions(k: int, r: int, i: int) -> range:
    """1-based positions of block i (1..k+2) in a list of n = k^2 + 2k + r - 1."""
    if i == 1:
        return range(1, k + r)
    return range((i - 1) * k + r, i * k + r)


def block_contents(p: Permutation, k: int, r: int, i: int) -> frozenset[int]:
    return frozenset(p.at(q) for q in block_positions(k, r, i))


def mae_lb_positions(k: int, r: int, j: int, i: int) -> list[int]:
    """Positions requested by the i-th request (1..k+1) of round j (1..k)."""
    n = k * k + 2 * k + r - 1
    lead = list(range(k + 1, k + r - 1))
    if i == k + 1:
        return list(range(k, k + r - 1)) + [2 * k + r - 1]
    if j == 1 and i == k:
        return list(range(k + 1, k + r)) + [3 * k + r - 1]
    if j > 1 and i == k - j + 2:
        return list(range(k + 1, k + r)) + [(j + 1) * k + r - 1]
    return lead + [(j + 1) * k + r - 1 + i, n - (i - 1) * k]


class MAEDynamicLB(Adversary):
    """Block/phase sequence that keeps MAE's access cost near k while a
    moving-pivot offline solution pays O(1) per request.

    A phase is k rounds of k+1 requests; after each phase the contents of
    blocks 2 and k+2 have swapped, so the same pattern repeats.
    """

    name = "mae_dynamic_lb"

    def __init__(self, k: int, r: int = 3, initial: Permutation | None = None):
        if r < 3 or k < 2:
            raise InvalidInputError(f"mae_dynamic_lb needs r >= 3 and k >= 2, got k={k} r={r}")
        n = k * k + 2 * k + r - 1
        super().__init__(n, r)
        self.k = k
        initial = initial or Permutation.identity(n)
        important = tuple(initial.at(q) for q in block_positions(k, r, 2)) + tuple(
            initial.at(q) for q in block_positions(k, r, k + 2)
        )
        self.schedule = DynamicLBSchedule(k, r, n, important)

    def round_and_index(self, t: int) -> tuple[int, int]:
        """Round j (1..k) and request i (1..k+1) of the 0-based step t."""
        within = t % self.schedule.requests_per_phase
        return within // (self.k + 1) + 1, within % (self.k + 1) + 1

    def _emit(self, current):
        j, i = self.round_and_index(self.t)
        if i == 1:
            self.schedule.pivots.append(current.at(self.n))
        pivot = self.schedule.pivots[-1]
        s = RequestSet.of([current.at(q) for q in mae_lb_positions(self.k, self.r, j, i)], self.n)
        if pivot not in s:
            raise AssertionError(f"round {j} request {i} lost its pivot {pivot}")
        self.schedule.cover.append(pivot)
        return s

    def offline_solution(self, trace, initial):
        return scheduled_dynamic_ledger(trace, initial, self.schedule)


def scheduled_dynamic_ledger(trace: Trace, initial: Permutation, schedule: DynamicLBSchedule) -> CostLedger:
    """Cost of: front the 2k important elements once, then front each round's pivot."""
    if len(schedule.cover) < trace.m:
        raise InvalidInputError("schedule shorter than trace")
    p = move_to_front(initial, schedule.important)
    setup = kendall_tau(initial, p)
    ledger = CostLedger()
    for t, (s, e) in enumerate(zip(trace.sets, schedule.cover)):
        nxt = move_to_front(p, [e])
        moving = kendall_tau(p, nxt) + (setup if t == 0 else 0)
        p = nxt
        ledger.record(access_cost(p, s), moving)
    return ledger


def mae_dynamic_lb(k: int, r: int = 3, initial: Permutation | None = None) -> tuple[MAEDynamicLB, DynamicLBSchedule]:
    adv = MAEDynamicLB(k, r, initial)
    return adv, adv.schedule


class TraceSource:
    """Replays a fixed trace through the adversary interface."""

    name = "trace"

    def __init__(self, trace: Trace):
        self.trace = trace
        self.n = trace.n
        self.r = trace.r
        self.t = 0

    def next_request(self, current: Permutation) -> RequestSet:
        s = self.trace.sets[self.t]
        self.t += 1
        return s

    def offline_solution(self, trace, initial):
        return None


def random_trace(n: int, r: int, m: int, seed: int) -> Trace:
    if not 1 <= r <= n:
        raise InvalidInputError(f"need 1 <= r <= n, got n={n} r={r}")
    rng = np.random.default_rng(seed)
    sets = tuple(
        RequestSet.of((rng.choice(n, size=r, replace=False) + 1).tolist(), n) for _ in range(m)
    )
    return Trace(n, r, sets)


def planted_trace(n: int, r: int, m: int, seed: int, hot: int = 2) -> Trace:
    """Random r-sets that each contain one of ``hot`` planted elements.

    Gives MWU something to learn, so Lazy Rounding actually changes phase.
    """
    if not 1 <= r <= n or not 1 <= hot <= n:
        raise InvalidInputError(f"invalid planted trace n={n} r={r} hot={hot}")
    rng = np.random.default_rng(seed)
    hot_set = (rng.choice(n, size=hot, replace=False) + 1).tolist()
    sets = []
    for _ in range(m):
        h = hot_set[int(rng.integers(hot))]
        others = [e for e in range(1, n + 1) if e != h]
        rest = rng.choice(others, size=r - 1, replace=False).tolist()
        sets.append(RequestSet.of([h, *rest], n))
    return Trace(n, r, tuple(sets))


ADVERSARIES: dict[str, Callable[..., Adversary]] = {
    "last_r": lambda n, r, **kw: LastR(n, r),
    "fixed_plus_last": lambda n, r, fixed=1, **kw: FixedPlusLast(n, r, int(fixed)),
    "relative_bad": lambda n, r, c=2, **kw: RelativeBad(n, r, float(c)),
    "count_bad": lambda n, r, initial=None, **kw: CountBad(n, r, initial),
    "mae_dynamic_lb": lambda n, r, k=None, initial=None, **kw: MAEDynamicLB(
        int(k) if k is not None else _k_for(n, r), r, initial
    ),
}


def _k_for(n: int, r: int) -> int:
    for k in range(2, n + 1):
        if k * k + 2 * k + r - 1 == n:
            return k
    raise InvalidInputError(f"n={n} is not k^2 + 2k + r - 1 for any k >= 2 with r={r}")


def make_adversary(name: str, n: int, r: int, **params) -> Adversary:
    try:
        factory = ADVERSARIES[name]
    except KeyError:
        raise InvalidInputError(f"unknown adversary {name!r}; choose from {sorted(ADVERSARIES)}") from None
    return factory(n, r, **params)
