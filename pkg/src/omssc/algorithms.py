"""Online algorithms behind one serve-step interface.

Every algorithm owns a current permutation and mutates it in ``serve``, which
returns ``(access, moving)``: the access cost paid with the permutation held
before the request and the Kendall tau distance of the move made after it.
Lazy Rounding is the exception: it decides on its new
permutation first and serves with it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import (
    DEFAULT_CAP,
    InvalidInputError,
    Permutation,
    RequestSet,
    access_cost,
    kendall_tau,
    move_elements,
    move_to_front,
)
from .mwu import (
    Distribution,
    MWUState,
    expected_access,
    greedy_rounding,
    mwu_distribution,
    mwu_update,
    tv_distance,
)


@dataclass(frozen=True)
class StepResult:
    access: int
    moving: int


class OnlineAlgorithm:
    name = "base"
    # True when the request is served after the move rather than before it
    serves_after_move = False

    def __init__(self, n: int, initial: Permutation | None = None):
        self.n = n
        self.current = initial if initial is not None else Permutation.identity(n)
        if self.current.n != n:
            raise InvalidInputError(f"initial permutation has {self.current.n} elements, expected {n}")
        self.t = 0

    def serve(self, s: RequestSet) -> StepResult:
        s.check_universe(self.n)
        access = access_cost(self.current, s)
        new = self.next_permutation(s, access)
        moving = kendall_tau(self.current, new)
        self.current = new
        self.t += 1
        return StepResult(access, moving)

    def next_permutation(self, s: RequestSet, access: int) -> Permutation:
        raise NotImplementedError

    def serving_permutation(self) -> Permutation:
        """The permutation the next request will be served with."""
        return self.current

    def _hits_in_order(self, s: RequestSet) -> list[int]:
        """Elements of ``s`` sorted by their position in the current permutation."""
        return sorted(s.elements, key=self.current.position)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n}, t={self.t}, current={self.current.order})"


def serve_step(state: OnlineAlgorithm, s: RequestSet) -> tuple[int, int, OnlineAlgorithm]:
    step = state.serve(s)
    return step.access, step.moving, state


class MTFFirst(OnlineAlgorithm):
    name = "mtf_first"

    def next_permutation(self, s, access):
        return move_to_front(self.current, [self.current.at(access)])


class MTFLast(OnlineAlgorithm):
    name = "mtf_last"

    def next_permutation(self, s, access):
        return move_to_front(self.current, [self._hits_in_order(s)[-1]])


class MTFAll(OnlineAlgorithm):
    name = "mtf_all"

    def next_permutation(self, s, access):
        return move_to_front(self.current, self._hits_in_order(s))


class MTFRandom(OnlineAlgorithm):
    name = "mtf_random"

    def __init__(self, n, initial=None, seed: int = 0):
        super().__init__(n, initial)
        self.seed = seed
        self.rng = np.random.default_rng(seed)

    def next_permutation(self, s, access):
        e = s.elements[int(self.rng.integers(s.r))]
        return move_to_front(self.current, [e])


class MTFRelative(OnlineAlgorithm):
    """Front every requested element lying within ``c`` times the first-hit position."""

    name = "mtf_relative"

    def __init__(self, n, initial=None, c: float = 2):
        if c < 1:
            raise InvalidInputError(f"mtf_relative needs c >= 1, got {c}")
        super().__init__(n, initial)
        self.c = c

    def next_permutation(self, s, access):
        window = self.c * access
        return move_to_front(
            self.current, [e for e in self._hits_in_order(s) if self.current.position(e) <= window]
        )


class MTFCount(OnlineAlgorithm):
    """Front the requested element seen in the most requests so far (this one included).

    Ties go to the smaller element id.
    """

    name = "mtf_count"

    def __init__(self, n, initial=None):
        super().__init__(n, initial)
        self.counts = [0] * (n + 1)

    def next_permutation(self, s, access):
        for e in s.elements:
            self.counts[e] += 1
        best = max(s.elements, key=lambda e: (self.counts[e], -e))
        return move_to_front(self.current, [best])


class MoveAllEqually(OnlineAlgorithm):
    """Shift every requested element left by ``access - 1`` positions."""

    name = "mae"

    def next_permutation(self, s, access):
        shift = access - 1
        return move_elements(self.current, {e: self.current.position(e) - shift for e in s.elements})


def mae_step(state: MoveAllEqually, s: RequestSet) -> StepResult:
    return state.serve(s)


class LazyRounding(OnlineAlgorithm):
    """Lazily derandomized MWU.

    Holds its permutation while the MWU distribution stays within total
    variation 1/n of the snapshot taken at the phase start; otherwise it
    re-rounds the current distribution and opens a new phase. The first phase
    starts at t=1 with the uniform snapshot and the initial permutation.

    Audit trails are kept per step: the expected MWU access cost before the
    update, the distance between consecutive MWU distributions, and the
    phase start times (1-based).
    """

    name = "lazy_rounding"
    serves_after_move = True

    def __init__(self, n, initial=None, r: int | None = None, cap: int = DEFAULT_CAP):
        super().__init__(n, initial)
        self.r = r
        self.mwu = MWUState.fresh(n, cap)
        self.dist = mwu_distribution(self.mwu)
        self.phase_dist = self.dist
        self.phase_start = 1
        self.phase_starts = [1]
        self.phase_snapshots: list[Distribution] = [self.dist]
        self.expected_mwu_access: list[float] = []
        self.step_tv: list[float] = []
        self._rounded: tuple[int, Permutation] | None = None

    @property
    def threshold(self) -> float:
        return 1.0 / self.n

    def _pending_rounding(self) -> Permutation | None:
        # depends only on past requests, so an adaptive adversary may look at it
        if tv_distance(self.dist, self.phase_dist) <= self.threshold:
            return None
        if self._rounded is None or self._rounded[0] != self.t:
            if self.r is None:
                raise InvalidInputError("lazy rounding needs r before its first re-rounding")
            self._rounded = (self.t, greedy_rounding(self.dist, self.r))
        return self._rounded[1]

    def serving_permutation(self) -> Permutation:
        pending = self._pending_rounding()
        return self.current if pending is None else pending

    def serve(self, s: RequestSet) -> StepResult:
        s.check_universe(self.n)
        if self.r is None:
            self.r = s.r
        t = self.t + 1
        moving = 0
        new = self._pending_rounding()
        if new is not None:
            moving = kendall_tau(self.current, new)
            self.current = new
            self.phase_dist = self.dist
            self.phase_start = t
            self.phase_starts.append(t)
            self.phase_snapshots.append(self.dist)
        access = access_cost(self.current, s)
        self.expected_mwu_access.append(expected_access(self.dist, s))
        self.mwu = mwu_update(self.mwu, s)
        new_dist = mwu_distribution(self.mwu)
        self.step_tv.append(tv_distance(self.dist, new_dist))
        self.dist = new_dist
        self.t = t
        return StepResult(access, moving)


def lazy_rounding_step(state: LazyRounding, s: RequestSet) -> StepResult:
    return state.serve(s)


def mtf_first(n, initial=None) -> MTFFirst:
    return MTFFirst(n, initial)


def mtf_last(n, initial=None) -> MTFLast:
    return MTFLast(n, initial)


def mtf_all(n, initial=None) -> MTFAll:
    return MTFAll(n, initial)


def mtf_random(n, initial=None, seed: int = 0) -> MTFRandom:
    return MTFRandom(n, initial, seed=seed)


def mtf_relative(n, initial=None, c: float = 2) -> MTFRelative:
    return MTFRelative(n, initial, c=c)


def mtf_count(n, initial=None) -> MTFCount:
    return MTFCount(n, initial)


def mae(n, initial=None) -> MoveAllEqually:
    return MoveAllEqually(n, initial)


def lazy_rounding(n, initial=None, r: int | None = None, cap: int = DEFAULT_CAP) -> LazyRounding:
    return LazyRounding(n, initial, r=r, cap=cap)


ALGORITHMS: dict[str, Callable[..., OnlineAlgorithm]] = {
    "mtf_first": mtf_first,
    "mtf_last": mtf_last,
    "mtf_all": mtf_all,
    "mtf_random": mtf_random,
    "mtf_relative": mtf_relative,
    "mtf_count": mtf_count,
    "mae": mae,
    "lazy_rounding": lazy_rounding,
}


def make_algorithm(name: str, n: int, initial: Permutation | None = None, **params) -> OnlineAlgorithm:
    try:
        factory = ALGORITHMS[name]
    except KeyError:
        raise InvalidInputError(f"unknown algorithm {name!r}; choose from {sorted(ALGORITHMS)}") from None
    return factory(n, initial, **params)


def run_trace(alg: OnlineAlgorithm, sets) -> list[StepResult]:
    return [alg.serve(s) for s in sets]


__all__ = [
    "ALGORITHMS",
    "Distribution",
    "LazyRounding",
    "MTFAll",
    "MTFCount",
    "MTFFirst",
    "MTFLast",
    "MTFRandom",
    "MTFRelative",
    "MoveAllEqually",
    "OnlineAlgorithm",
    "StepResult",
    "lazy_rounding",
    "lazy_rounding_step",
    "mae",
    "mae_step",
    "make_algorithm",
    "mtf_all",
    "mtf_count",
    "mtf_first",
    "mtf_last",
    "mtf_random",
    "mtf_relative",
    "run_trace",
    "serve_step",
]
