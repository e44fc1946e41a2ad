"""Algorithm-versus-source matches with oracle comparison and inline audits."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .adversaries import TraceSource, make_adversary, planted_trace, random_trace
from .algorithms import LazyRounding, MoveAllEqually, OnlineAlgorithm, make_algorithm
from .core import (
    DEFAULT_CAP,
    CapacityError,
    CostLedger,
    InvalidInputError,
    Permutation,
    RequestSet,
    Trace,
    access_cost,
    kendall_tau,
)
from .io import read_trace
from .mwu import expected_access_by_subset, greedy_rounding, greedy_rounding_blocks
from .oracles import (
    DYNAMIC_CAP,
    greedy_static,
    opt_dynamic_dp,
    opt_static_bruteforce,
    static_cost,
)

ORACLES = ("static", "greedy", "dynamic", "scheduled")
TV_TOL = 1e-9
PHASE_TOL = 1e-6


@dataclass(frozen=True)
class RunConfig:
    algorithm: str
    source: str  # "trace:<path>", "random", "planted", or "adv:<id>[,key=value...]"
    n: int | None = None
    r: int | None = None
    m: int | None = None
    seed: int = 0
    alg_params: dict = field(default_factory=dict)
    audits: str = "on"  # off | on | strict
    oracles: tuple[str, ...] = ("static",)
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        for name in self.oracles:
            if name not in ORACLES:
                raise InvalidInputError(f"unknown oracle {name!r}; choose from {ORACLES}")
        if self.audits not in ("off", "on", "strict"):
            raise InvalidInputError(f"audits must be off, on or strict, got {self.audits!r}")
        for attr in ("n", "r", "m"):
            value = getattr(self, attr)
            if value is not None and value < 1:
                raise InvalidInputError(f"{attr} must be positive, got {value}")
        if self.n is not None and self.r is not None and self.r > self.n:
            raise InvalidInputError(f"r={self.r} exceeds n={self.n}")


@dataclass
class AuditOutcome:
    name: str
    passed: bool
    worst_margin: float
    checks: int

    @classmethod
    def from_margins(cls, name: str, margins) -> "AuditOutcome":
        margins = list(margins)
        worst = min(margins) if margins else math.inf
        return cls(name, worst >= 0, worst, len(margins))


@dataclass
class Episode:
    """What happened in one run: the realized trace and every permutation."""

    trace: Trace
    ledger: CostLedger
    before: list[Permutation]
    after: list[Permutation]
    initial: Permutation


@dataclass
class RunReport:
    config: RunConfig
    ledger: CostLedger
    oracle_costs: dict[str, int]
    ratios: dict[str, float]
    audits: list[AuditOutcome]
    trace: Trace

    @property
    def total_cost(self) -> int:
        return self.ledger.total

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.audits)

    def to_dict(self) -> dict:
        cfg = asdict(self.config)
        cfg["oracles"] = list(self.config.oracles)
        return {
            "config": cfg,
            "totals": {
                "access": self.ledger.total_access,
                "moving": self.ledger.total_moving,
                "cost": self.ledger.total,
                "m": len(self.ledger),
            },
            "oracle_costs": self.oracle_costs,
            "ratios": self.ratios,
            "audits": [_json_safe(asdict(a)) for a in self.audits],
            "steps": [[s.t, s.access, s.moving] for s in self.ledger.steps],
            "trace": {"n": self.trace.n, "r": self.trace.r, "sets": [list(s.elements) for s in self.trace.sets]},
        }


def _json_safe(d: dict) -> dict:
    return {k: (None if isinstance(v, float) and math.isinf(v) else v) for k, v in d.items()}


def play(alg: OnlineAlgorithm, source, m: int) -> Episode:
    """Feed ``m`` requests from ``source`` (adversary or trace replay) to ``alg``."""
    initial = alg.current
    ledger = CostLedger()
    before, after, sets = [], [], []
    for _ in range(m):
        p = alg.current
        s = source.next_request(alg.serving_permutation())
        step = alg.serve(s)
        ledger.record(step.access, step.moving)
        before.append(p)
        after.append(alg.current)
        sets.append(s)
    n = alg.n
    r = sets[0].r if sets else 1
    return Episode(Trace(n, r, tuple(sets)), ledger, before, after, initial)


def parse_source(spec: str) -> tuple[str, str, dict]:
    """Split ``trace:path`` / ``adv:id,k=v`` / ``random`` into (kind, name, params)."""
    if spec in ("random", "planted"):
        return spec, spec, {}
    kind, _, rest = spec.partition(":")
    if kind == "trace" and rest:
        return "trace", rest, {}
    if kind == "adv" and rest:
        name, *pairs = rest.split(",")
        return "adv", name, parse_params(pairs)
    raise InvalidInputError(f"bad source {spec!r}; use trace:<path>, adv:<id>[,k=v...], random or planted")


def parse_params(pairs) -> dict:
    params = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            raise InvalidInputError(f"parameter {pair!r} is not key=value")
        params[key.strip()] = _number(value.strip())
    return params


def _number(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def run(config: RunConfig) -> RunReport:
    kind, name, src_params = parse_source(config.source)
    alg_params = dict(config.alg_params)
    adversary = None
    if kind == "trace":
        trace = read_trace(name)
        n, r, m = trace.n, trace.r, config.m or trace.m
        if m > trace.m:
            raise InvalidInputError(f"m={m} exceeds trace length {trace.m}")
        source = TraceSource(trace)
    elif kind == "random":
        n, r, m = _require(config, "n", "r", "m")
        source = TraceSource(random_trace(n, r, m, config.seed))
    elif kind == "planted":
        n, r, m = _require(config, "n", "r", "m")
        source = TraceSource(planted_trace(n, r, m, config.seed))
    else:
        n, r, m = _require(config, "n", "r", "m")
        adversary = make_adversary(name, n, r, **src_params)
        n, r = adversary.n, adversary.r
        source = adversary

    if config.algorithm == "mtf_random":
        alg_params.setdefault("seed", config.seed)
    if config.algorithm == "lazy_rounding":
        alg_params.setdefault("r", r)
        alg_params.setdefault("cap", config.cap)
    alg = make_algorithm(config.algorithm, n, **alg_params)
    episode = play(alg, source, m)

    oracle_costs = compute_oracles(episode, config.oracles, adversary, config.cap)
    total = episode.ledger.total
    ratios = {k: total / v for k, v in oracle_costs.items() if v > 0}
    audits = [] if config.audits == "off" else run_audits(alg, episode, config.cap)
    return RunReport(config, episode.ledger, oracle_costs, ratios, audits, episode.trace)


def _require(config: RunConfig, *names):
    values = tuple(getattr(config, k) for k in names)
    missing = [k for k, v in zip(names, values) if v is None]
    if missing:
        raise InvalidInputError(f"source needs {', '.join(missing)}")
    return values


def compute_oracles(episode: Episode, names, adversary=None, cap: int = DEFAULT_CAP) -> dict[str, int]:
    trace = episode.trace
    out: dict[str, int] = {}
    for name in names:
        if name == "static":
            out[name] = opt_static_bruteforce(trace, cap).cost
        elif name == "greedy":
            out[name] = static_cost(greedy_static(trace), trace.sets)
        elif name == "dynamic":
            if trace.n > DYNAMIC_CAP:
                raise CapacityError(f"dynamic oracle supports n <= {DYNAMIC_CAP}, got {trace.n}")
            out[name] = opt_dynamic_dp(trace, episode.initial).cost
        elif name == "scheduled":
            ledger = adversary.offline_solution(trace, episode.initial) if adversary else None
            if ledger is None:
                raise InvalidInputError("the scheduled oracle needs an adversary with a constructed solution")
            out[name] = ledger.total
    return out


# --- audits -----------------------------------------------------------------

def audit_ledger(alg: OnlineAlgorithm, ep: Episode) -> list[AuditOutcome]:
    """Recompute access and moving costs from the recorded permutations."""
    access_err, moving_err = [], []
    for s, p0, p1, step in zip(ep.trace.sets, ep.before, ep.after, ep.ledger.steps):
        served = p1 if alg.serves_after_move else p0
        access_err.append(-abs(access_cost(served, s) - step.access))
        moving_err.append(-abs(kendall_tau(p0, p1) - step.moving))
    return [
        AuditOutcome.from_margins("ledger_access", access_err),
        AuditOutcome.from_margins("ledger_moving", moving_err),
    ]


def audit_mae(ep: Episode) -> AuditOutcome:
    """MAE never pays more than r(access - 1) to move."""
    r = ep.trace.r
    return AuditOutcome.from_margins(
        "mae_moving", (r * (st.access - 1) - st.moving for st in ep.ledger.steps)
    )


def rounding_margins(dist, r: int) -> tuple[list[float], list[float]]:
    """Margins of the rounding guarantee and of the sorted-block lower bound."""
    rho = greedy_rounding(dist, r)
    expect = expected_access_by_subset(dist, range(1, dist.n + 1), r)
    bound = [2 * r * e - access_cost(rho, RequestSet(s)) + TV_TOL for s, e in expect.items()]
    blocks = [
        e - (j + 1) / 2 + TV_TOL
        for j, (block, e) in enumerate(greedy_rounding_blocks(dist, r), start=1)
        if len(block) == r
    ]
    return bound, blocks


def audit_lazy_rounding(alg: LazyRounding, ep: Episode, static_opt: int | None) -> list[AuditOutcome]:
    n, r = alg.n, alg.r
    expected = alg.expected_mwu_access
    mwu_total = sum(expected)
    outcomes = [
        AuditOutcome.from_margins(
            "switch_cost", (e / n**3 - tv + TV_TOL for e, tv in zip(expected, alg.step_tv))
        )
    ]
    starts = alg.phase_starts
    phase_sums = [sum(expected[a - 1:b - 1]) for a, b in zip(starts, starts[1:])]
    outcomes.append(AuditOutcome.from_margins("mwu_cost_dtv", (s - n**2 + PHASE_TOL for s in phase_sums)))

    bound_margins, block_margins = [], []
    for snap in alg.phase_snapshots[1:]:
        b, k = rounding_margins(snap, r)
        bound_margins.extend(b)
        block_margins.extend(k)
    outcomes.append(AuditOutcome.from_margins("greedy_rounding", bound_margins))
    outcomes.append(AuditOutcome.from_margins("rounding_opt_lower_bound", block_margins))

    per_step = [4 * r * e - st.access for e, st in zip(expected, ep.ledger.steps)]
    outcomes.append(AuditOutcome.from_margins("alg_acc_cost_step", per_step))
    outcomes.append(
        AuditOutcome.from_margins("alg_acc_cost", [4 * r * mwu_total - ep.ledger.total_access])
    )
    outcomes.append(AuditOutcome.from_margins("moving_cost", [mwu_total - ep.ledger.total_moving]))
    if static_opt is not None:
        additive = 2 * n**4 * math.log(n)
        outcomes.append(
            AuditOutcome.from_margins("mwu_scaled_final", [1.25 * static_opt + additive - mwu_total])
        )
        outcomes.append(
            AuditOutcome.from_margins(
                "theorem2",
                [(5 * r + 2) * static_opt + 2 * (4 * r + 1) * n**4 * math.log(n) - ep.ledger.total],
            )
        )
    return outcomes


def run_audits(alg: OnlineAlgorithm, ep: Episode, cap: int = DEFAULT_CAP) -> list[AuditOutcome]:
    outcomes = audit_ledger(alg, ep)
    if isinstance(alg, MoveAllEqually):
        outcomes.append(audit_mae(ep))
    if isinstance(alg, LazyRounding):
        static_opt = opt_static_bruteforce(ep.trace, cap).cost if ep.trace.n <= cap else None
        outcomes.extend(audit_lazy_rounding(alg, ep, static_opt))
    return outcomes

