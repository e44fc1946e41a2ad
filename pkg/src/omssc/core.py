"""Permutations, request sets, cost primitives and Lehmer indexing.

Positions are 1-based everywhere: the element in front of a permutation has
position 1, so serving a request whose first element sits in front costs 1.
Elements are the integers 1..n.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

DEFAULT_CAP = 8
MAX_CAP = 9


class InvalidInputError(ValueError):
    pass


class CapacityError(ValueError):
    pass


@dataclass(frozen=True)
class Permutation:
    """A list order: ``order[p - 1]`` is the element at position ``p``."""

    order: tuple[int, ...]
    _positions: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        order = tuple(int(e) for e in self.order)
        n = len(order)
        if n < 1:
            raise InvalidInputError("a permutation needs at least one element")
        if sorted(order) != list(range(1, n + 1)):
            raise InvalidInputError(f"{order} is not a permutation of 1..{n}")
        positions = [0] * n
        for p, e in enumerate(order, start=1):
            positions[e - 1] = p
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "_positions", tuple(positions))

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @property
    def n(self) -> int:
        return len(self.order)

    @property
    def inverse(self) -> tuple[int, ...]:
        """Positions indexed by ``element - 1``."""
        return self._positions

    def position(self, element: int) -> int:
        if not 1 <= element <= self.n:
            raise InvalidInputError(f"element {element} not in universe 1..{self.n}")
        return self._positions[element - 1]

    def at(self, position: int) -> int:
        return self.order[position - 1]

    def __len__(self) -> int:
        return len(self.order)

    def __iter__(self):
        return iter(self.order)


@dataclass(frozen=True)
class RequestSet:
    elements: tuple[int, ...]

    def __post_init__(self) -> None:
        elements = tuple(int(e) for e in self.elements)
        if not elements:
            raise InvalidInputError("empty request set")
        if len(set(elements)) != len(elements):
            raise InvalidInputError(f"duplicate element in request {elements}")
        if min(elements) < 1:
            raise InvalidInputError(f"element ids are 1-based, got {elements}")
        object.__setattr__(self, "elements", tuple(sorted(elements)))

    @classmethod
    def of(cls, elements: Iterable[int], n: int | None = None) -> "RequestSet":
        s = cls(tuple(elements))
        if n is not None:
            s.check_universe(n)
        return s

    @property
    def r(self) -> int:
        return len(self.elements)

    def check_universe(self, n: int) -> None:
        if self.r > n or self.elements[-1] > n:
            raise InvalidInputError(f"request {self.elements} not within universe 1..{n}")

    def __contains__(self, element: object) -> bool:
        return element in self.elements

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class Trace:
    """A fixed r-uniform request sequence over the universe 1..n."""

    n: int
    r: int
    sets: tuple[RequestSet, ...]

    def __post_init__(self) -> None:
        if self.n < 1 or not 1 <= self.r <= self.n:
            raise InvalidInputError(f"invalid trace header n={self.n} r={self.r}")
        sets = tuple(self.sets)
        for s in sets:
            s.check_universe(self.n)
            if s.r != self.r:
                raise InvalidInputError(f"request {s.elements} has size {s.r}, expected r={self.r}")
        object.__setattr__(self, "sets", sets)

    @property
    def m(self) -> int:
        return len(self.sets)

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)


@dataclass(frozen=True)
class StepRecord:
    t: int
    access: int
    moving: int


@dataclass
class CostLedger:
    steps: list[StepRecord] = field(default_factory=list)

    def record(self, access: int, moving: int) -> StepRecord:
        if access < 1 or moving < 0:
            raise InvalidInputError(f"bad step costs access={access} moving={moving}")
        step = StepRecord(len(self.steps) + 1, int(access), int(moving))
        self.steps.append(step)
        return step

    @property
    def total_access(self) -> int:
        return sum(s.access for s in self.steps)

    @property
    def total_moving(self) -> int:
        return sum(s.moving for s in self.steps)

    @property
    def total(self) -> int:
        return self.total_access + self.total_moving

    def __len__(self) -> int:
        return len(self.steps)


def _check_same_universe(p1: Permutation, p2: Permutation) -> None:
    if p1.n != p2.n:
        raise InvalidInputError(f"universe sizes differ: {p1.n} vs {p2.n}")


def access_cost(p: Permutation, s: RequestSet) -> int:
    """Position of the first element of ``s`` in ``p``."""
    s.check_universe(p.n)
    pos = p.inverse
    return min(pos[e - 1] for e in s.elements)


def kendall_tau(p1: Permutation, p2: Permutation) -> int:
    """Number of element pairs ordered differently by ``p1`` and ``p2``.

    Relabels ``p2`` by positions in ``p1`` and counts inversions with a
    merge sort, O(n log n).
    """
    _check_same_universe(p1, p2)
    pos1 = p1.inverse
    seq = [pos1[e - 1] for e in p2.order]
    return _count_inversions(seq)


def _count_inversions(seq: list[int]) -> int:
    if len(seq) < 2:
        return 0
    width = 1
    inversions = 0
    src = list(seq)
    n = len(src)
    while width < n:
        dst = []
        for lo in range(0, n, 2 * width):
            left = src[lo:lo + width]
            right = src[lo + width:lo + 2 * width]
            i = j = 0
            while i < len(left) and j < len(right):
                if left[i] <= right[j]:
                    dst.append(left[i])
                    i += 1
                else:
                    dst.append(right[j])
                    inversions += len(left) - i
                    j += 1
            dst.extend(left[i:])
            dst.extend(right[j:])
        src = dst
        width *= 2
    return inversions


def _check_cap(n: int, cap: int) -> None:
    if cap > MAX_CAP:
        raise CapacityError(f"cap {cap} exceeds the hard limit {MAX_CAP}")
    if n > cap:
        raise CapacityError(f"n={n} exceeds the permutation-space cap {cap}")


def encode(p: Permutation, cap: int = DEFAULT_CAP) -> int:
    """Lehmer rank of ``p``; the identity has rank 0.

    Ranks coincide with lexicographic order of ``p.order``.
    """
    n = p.n
    _check_cap(n, cap)
    index = 0
    remaining = list(range(1, n + 1))
    for i, e in enumerate(p.order):
        digit = remaining.index(e)
        index += digit * math.factorial(n - 1 - i)
        remaining.pop(digit)
    return index


def decode(index: int, n: int, cap: int = DEFAULT_CAP) -> Permutation:
    _check_cap(n, cap)
    if not 0 <= index < math.factorial(n):
        raise InvalidInputError(f"index {index} outside [0, {n}!)")
    remaining = list(range(1, n + 1))
    order = []
    for i in range(n):
        digit, index = divmod(index, math.factorial(n - 1 - i))
        order.append(remaining.pop(digit))
    return Permutation(tuple(order))


def move_elements(p: Permutation, targets: Mapping[int, int]) -> Permutation:
    """Put each targeted element at its new position; others fill the gaps in order.

    Each target position must lie in ``[1, current position]`` and no two
    targets may share a position.
    """
    if not targets:
        return p
    n = p.n
    placed: dict[int, int] = {}
    for e, new_pos in targets.items():
        cur = p.position(e)
        if not 1 <= new_pos <= cur:
            raise InvalidInputError(f"target {new_pos} for element {e} outside [1, {cur}]")
        if new_pos in placed:
            raise InvalidInputError(f"elements {placed[new_pos]} and {e} both target position {new_pos}")
        placed[new_pos] = e
    rest = iter(e for e in p.order if e not in targets)
    order = [placed[q] if q in placed else next(rest) for q in range(1, n + 1)]
    return Permutation(tuple(order))


def move_to_front(p: Permutation, elements: Sequence[int]) -> Permutation:
    """Put ``elements`` in positions 1..len(elements), in the given order."""
    front = list(dict.fromkeys(elements))
    chosen = set(front)
    for e in front:
        p.position(e)
    return Permutation(tuple(front + [e for e in p.order if e not in chosen]))


# Permutation-space tables, shared by the MWU engine and the exact oracles.

@lru_cache(maxsize=None)
def _permutation_table(n: int) -> tuple[np.ndarray, np.ndarray]:
    orders = np.array(list(itertools.permutations(range(1, n + 1))), dtype=np.int8)
    orders.setflags(write=False)
    positions = np.empty_like(orders)
    rows = np.arange(orders.shape[0])[:, None]
    positions[rows, orders - 1] = np.arange(1, n + 1, dtype=np.int8)
    positions.setflags(write=False)
    return orders, positions


def permutation_orders(n: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """All n! permutations as rows, in Lehmer-rank order (row i has rank i)."""
    _check_cap(n, cap)
    return _permutation_table(n)[0]


def permutation_positions(n: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """``positions[i, e - 1]`` is the position of element ``e`` in the rank-i permutation."""
    _check_cap(n, cap)
    return _permutation_table(n)[1]


def access_costs_all(n: int, s: RequestSet, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Access cost of ``s`` under every permutation, indexed by Lehmer rank."""
    s.check_universe(n)
    positions = permutation_positions(n, cap)
    idx = np.asarray(s.elements, dtype=np.intp) - 1
    return positions[:, idx].min(axis=1).astype(np.int64)


@lru_cache(maxsize=8)
def kendall_tau_matrix(n: int, cap: int = 6) -> np.ndarray:
    """Pairwise Kendall tau distances between all n! permutations."""
    _check_cap(n, cap)
    positions = permutation_positions(n, max(cap, n)).astype(np.int16)
    pairs = list(itertools.combinations(range(n), 2))
    if not pairs:
        return np.zeros((1, 1), dtype=np.int32)
    i, j = (np.array(x) for x in zip(*pairs))
    signs = np.sign(positions[:, i] - positions[:, j]).astype(np.int32)
    dist = (len(pairs) - signs @ signs.T) // 2
    dist.setflags(write=False)
    return dist
