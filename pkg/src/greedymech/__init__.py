"""Truthful mechanisms via greedy iterative packing.

Single-bin knapsack oracles, their multi-bin and online compositions,
critical-value payments, and checkers for the game-theoretic properties
that make the compositions truthful.
"""
from .allocators import Allocator
from .core import (
    Assignment,
    Bid,
    BinSpec,
    Instance,
    InstanceError,
    assignment_value,
    improves,
    make_bid,
    make_instance,
    validate_instance,
)
from .mechanism import Outcome, PaymentConfig, critical_value, run_mechanism
from .online import dynamic_auction, dynamic_multi_auction, simulate_online
from .oracles import (
    FptasConfig,
    OracleResult,
    exact_oracle,
    half_greedy,
    max_greedy,
    max_value_oracle,
    monotone_fptas,
    pseudo_pack,
    scale_k,
)
from .packing import OracleKind, gap_iterative_pack, global_greedy_pack, iterative_pack

__version__ = "0.1.0"
