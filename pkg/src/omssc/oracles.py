"""Offline baselines and the exact counting identities behind the averaging bound."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .core import (
    DEFAULT_CAP,
    CostLedger,
    InvalidInputError,
    Permutation,
    RequestSet,
    Trace,
    access_cost,
    access_costs_all,
    decode,
    encode,
    kendall_tau,
    kendall_tau_matrix,
    move_to_front,
    permutation_orders,
)

DYNAMIC_CAP = 6


@dataclass(frozen=True)
class StaticOptResult:
    permutation: Permutation
    cost: int


@dataclass(frozen=True)
class DynamicOptResult:
    trajectory: tuple[Permutation, ...]
    cost: int


def static_cost(p: Permutation, sets: Iterable[RequestSet]) -> int:
    """Access cost of serving every request with the fixed permutation ``p``."""
    return sum(access_cost(p, s) for s in sets)


def static_costs_all(n: int, sets: Iterable[RequestSet], cap: int = DEFAULT_CAP) -> np.ndarray:
    """Static cost of every permutation, indexed by Lehmer rank."""
    total = np.zeros(math.factorial(n), dtype=np.int64)
    for s, count in Counter(sets).items():
        total += count * access_costs_all(n, s, cap)
    return total


def opt_static_bruteforce(trace: Trace, cap: int = DEFAULT_CAP) -> StaticOptResult:
    costs = static_costs_all(trace.n, trace.sets, cap)
    best = int(np.argmin(costs))
    return StaticOptResult(decode(best, trace.n, max(cap, trace.n)), int(costs[best]))


def greedy_static(trace: Trace) -> Permutation:
    """Repeatedly front the element covering the most still-uncovered requests."""
    uncovered = list(trace.sets)
    remaining = set(range(1, trace.n + 1))
    order = []
    while uncovered and remaining:
        hits = Counter(e for s in uncovered for e in s.elements if e in remaining)
        if not hits:
            break
        best = min(hits, key=lambda e: (-hits[e], e))
        order.append(best)
        remaining.discard(best)
        uncovered = [s for s in uncovered if best not in s]
    order.extend(sorted(remaining))
    return Permutation(tuple(order))


def opt_dynamic_dp(trace: Trace, initial: Permutation | None = None, cap: int = DYNAMIC_CAP) -> DynamicOptResult:
    """Exact optimal trajectory by value iteration over all n! states.

    ``cost[t][p] = min_q(cost[t-1][q] + kt(q, p)) + access(p, S_t)`` with the
    move into the first state charged from ``initial``. Ties resolve to the
    smallest Lehmer rank.
    """
    n = trace.n
    initial = initial if initial is not None else Permutation.identity(n)
    if initial.n != n:
        raise InvalidInputError("initial permutation does not match the trace universe")
    kt = kendall_tau_matrix(n, cap)
    orders = permutation_orders(n, max(cap, n))
    if trace.m == 0:
        return DynamicOptResult((), 0)
    start = encode(initial, max(cap, n))
    cost = kt[start].astype(np.int64) + access_costs_all(n, trace.sets[0], max(cap, n))
    back = []
    for s in trace.sets[1:]:
        total = cost[:, None] + kt
        prev = np.argmin(total, axis=0)
        cost = total[prev, np.arange(total.shape[1])] + access_costs_all(n, s, max(cap, n))
        back.append(prev)
    state = int(np.argmin(cost))
    best = int(cost[state])
    path = [state]
    for prev in reversed(back):
        state = int(prev[state])
        path.append(state)
    path.reverse()
    trajectory = tuple(Permutation(tuple(int(e) for e in orders[i])) for i in path)
    return DynamicOptResult(trajectory, best)


def trajectory_cost(trace: Trace, trajectory: Sequence[Permutation], initial: Permutation) -> int:
    """Access plus movement along a trajectory, starting from ``initial``."""
    total = 0
    prev = initial
    for p, s in zip(trajectory, trace.sets, strict=True):
        total += access_cost(p, s) + kendall_tau(prev, p)
        prev = p
    return total


def cover_schedule(trace: Trace, trajectory: Sequence[Permutation]) -> list[int]:
    """The element each trajectory state uses to serve its request."""
    return [p.at(access_cost(p, s)) for p, s in zip(trajectory, trace.sets, strict=True)]


def mtf_opt_replay(trace: Trace, schedule: Sequence[int], initial: Permutation | None = None) -> CostLedger:
    """Move the scheduled covering element to the front, then serve at cost 1."""
    if len(schedule) != trace.m:
        raise InvalidInputError(f"schedule has {len(schedule)} entries for {trace.m} requests")
    p = initial if initial is not None else Permutation.identity(trace.n)
    ledger = CostLedger()
    for s, e in zip(trace.sets, schedule):
        if e not in s:
            raise InvalidInputError(f"scheduled element {e} not in request {s.elements}")
        moving = p.position(e) - 1
        p = move_to_front(p, [e])
        ledger.record(access_cost(p, s), moving)
    return ledger


def count_perms_with_cost(n: int, r: int, i: int) -> int:
    """Number of permutations whose access cost on a fixed r-set is exactly i."""
    if not 1 <= r <= n:
        raise InvalidInputError(f"need 1 <= r <= n, got n={n} r={r}")
    if not 1 <= i <= n - r + 1:
        raise InvalidInputError(f"access cost {i} outside [1, {n - r + 1}]")
    return math.comb(n - i, r - 1) * math.factorial(r) * math.factorial(n - r)


def average_access(n: int, r: int) -> Fraction:
    """Mean access cost of a fixed r-set over all n! permutations."""
    total = sum(i * count_perms_with_cost(n, r, i) for i in range(1, n - r + 2))
    return Fraction(total, math.factorial(n))


def theorem1_bound(n: int, r: int) -> Fraction:
    """Deterministic lower bound (r + 1)(1 - r / (n + 1)) on the competitive ratio."""
    if not 1 <= r <= n:
        raise InvalidInputError(f"need 1 <= r <= n, got n={n} r={r}")
    return (r + 1) * (1 - Fraction(r, n + 1))
