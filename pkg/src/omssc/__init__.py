"""Online min-sum set cover: online algorithms, lower-bound adversaries,
offline oracles and an audit harness."""
from .core import (
    CapacityError,
    CostLedger,
    InvalidInputError,
    Permutation,
    RequestSet,
    Trace,
    access_cost,
    decode,
    encode,
    kendall_tau,
    move_elements,
)
from .algorithms import make_algorithm
from .adversaries import make_adversary, random_trace
from .harness import RunConfig, run

__version__ = "0.1.0"
