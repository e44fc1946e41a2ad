"""Exact multiplicative weights over all n! permutations.

Weights are never stored. The state keeps integer cumulative access costs per
permutation, and the weight of a permutation is ``exp(-cum_cost / n**3)``.
Normalizing after subtracting the minimum cost keeps every run free of
underflow, however long it is.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    DEFAULT_CAP,
    InvalidInputError,
    Permutation,
    RequestSet,
    access_costs_all,
    encode,
    permutation_positions,
)


TIE_TOL = 1e-12


@dataclass(frozen=True)
class MWUState:
    n: int
    cum_cost: np.ndarray = field(repr=False)
    t: int = 0
    cap: int = DEFAULT_CAP

    @classmethod
    def fresh(cls, n: int, cap: int = DEFAULT_CAP) -> "MWUState":
        permutation_positions(n, cap)  # capacity check
        return cls(n, np.zeros(math.factorial(n), dtype=np.int64), 0, cap)

    @property
    def learning_rate(self) -> float:
        return 1.0 / self.n**3

    @property
    def beta(self) -> float:
        return math.exp(-self.learning_rate)


@dataclass(frozen=True)
class Distribution:
    """Probabilities over permutations, indexed by Lehmer rank."""

    n: int
    probs: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape != (math.factorial(self.n),):
            raise InvalidInputError(f"expected {math.factorial(self.n)} probabilities, got shape {probs.shape}")
        if (probs < 0).any() or abs(probs.sum() - 1.0) > 1e-9:
            raise InvalidInputError("probabilities must be nonnegative and sum to 1")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, n: int) -> "Distribution":
        size = math.factorial(n)
        return cls(n, np.full(size, 1.0 / size))

    @classmethod
    def point_mass(cls, p: Permutation, cap: int = DEFAULT_CAP) -> "Distribution":
        probs = np.zeros(math.factorial(p.n))
        probs[encode(p, cap)] = 1.0
        return cls(p.n, probs)

    @classmethod
    def from_weights(cls, n: int, weights) -> "Distribution":
        w = np.asarray(weights, dtype=float)
        return cls(n, w / w.sum())


def mwu_update(m: MWUState, s: RequestSet) -> MWUState:
    """Charge every permutation its access cost on ``s``."""
    costs = access_costs_all(m.n, s, m.cap)
    return MWUState(m.n, m.cum_cost + costs, m.t + 1, m.cap)


def mwu_distribution(m: MWUState) -> Distribution:
    shifted = (m.cum_cost - m.cum_cost.min()).astype(float)
    w = np.exp(-shifted * m.learning_rate)
    return Distribution(m.n, w / w.sum())


def expected_access(d: Distribution, s: RequestSet) -> float:
    return float(d.probs @ access_costs_all(d.n, s, max(d.n, DEFAULT_CAP)))


def tv_distance(d1: Distribution, d2: Distribution) -> float:
    """Positive-part mass difference ``sum(max(0, d1 - d2))``."""
    if d1.n != d2.n:
        raise InvalidInputError(f"distributions over different universes: {d1.n} vs {d2.n}")
    return float(np.clip(d1.probs - d2.probs, 0.0, None).sum())


def expected_access_by_subset(d: Distribution, candidates, r: int) -> dict[tuple[int, ...], float]:
    """Expected access cost of every r-subset of ``candidates`` (sorted tuples)."""
    positions = permutation_positions(d.n, max(d.n, DEFAULT_CAP))
    out = {}
    for subset in itertools.combinations(sorted(candidates), r):
        idx = np.asarray(subset, dtype=np.intp) - 1
        out[subset] = float(d.probs @ positions[:, idx].min(axis=1))
    return out


def greedy_rounding_blocks(d: Distribution, r: int) -> list[tuple[tuple[int, ...], float]]:
    """Blocks chosen by greedy rounding with their expected access costs.

    Each round takes the r-subset of the remaining elements with the least
    expected access cost; ties go to the lexicographically smallest tuple.
    When r does not divide n, the last block holds the leftover elements.
    """
    if not 1 <= r <= d.n:
        raise InvalidInputError(f"r={r} outside [1, {d.n}]")
    remaining = set(range(1, d.n + 1))
    blocks = []
    while remaining:
        size = min(r, len(remaining))
        scores = expected_access_by_subset(d, remaining, size)
        # summation order makes exact ties differ by a few ulps; keys are lexicographic
        low = min(scores.values())
        best = next(k for k, v in scores.items() if v <= low + TIE_TOL)
        blocks.append((best, scores[best]))
        remaining.difference_update(best)
    return blocks


def greedy_rounding(d: Distribution, r: int) -> Permutation:
    order = [e for block, _ in greedy_rounding_blocks(d, r) for e in block]
    return Permutation(tuple(order))
