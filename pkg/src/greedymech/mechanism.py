"""Critical-value payments for monotone allocators."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .allocators import Allocator
from .core import Assignment, Instance
from .oracles import ceil_log2

DEFAULT_DELTA = Fraction(1, 10 ** 6)


class MechanismError(ValueError):
    pass


class DisallowedAllocator(MechanismError):
    pass


@dataclass(frozen=True)
class PaymentConfig:
    mode: str = "bisection"
    delta: Fraction = DEFAULT_DELTA

    def __post_init__(self):
        if self.mode not in ("bisection", "breakpoint"):
            raise ValueError(f"unknown payment mode {self.mode!r}")
        if self.delta <= 0:
            raise ValueError("delta must be positive")


@dataclass(frozen=True)
class Outcome:
    assignment: Assignment
    payments: dict = field(hash=False)

    def payment(self, agent_id: int) -> Fraction:
        return self.payments.get(agent_id, Fraction(0))


def wins_at(inst: Instance, allocator: Allocator, agent: int, value: Fraction) -> bool:
    bid = inst.bids[agent].with_value(value)
    return agent in allocator(inst.with_bid(bid)).selected


def _bisection(inst, allocator, agent, delta) -> Fraction:
    if wins_at(inst, allocator, agent, Fraction(0)):
        return Fraction(0)
    own = inst.bids[agent].value
    # Searching [0, 2^K] rather than [0, own] keeps every midpoint on a
    # fixed dyadic lattice, so any winning report yields the same payment.
    lo, hi = Fraction(0), Fraction(2) ** ceil_log2(own)
    while hi - lo >= delta:
        mid = (lo + hi) / 2
        if wins_at(inst, allocator, agent, mid):
            hi = mid
        else:
            lo = mid
    return min(hi, own)


def _breakpoint(inst, allocator, agent) -> Fraction:
    # With the max-value oracle the outcome only depends on how the agent's
    # value compares with rival values, so the threshold is one of them.
    own = inst.bids[agent].value
    cands = sorted({Fraction(0)} | {b.value for b in inst.bids
                                    if b.agent_id != agent and b.value < own})
    for idx, c in enumerate(cands):
        nxt = cands[idx + 1] if idx + 1 < len(cands) else own
        if wins_at(inst, allocator, agent, c):
            return c
        if nxt > c and wins_at(inst, allocator, agent, (c + nxt) / 2):
            return c
    return own


def critical_value(inst: Instance, allocator: Allocator, agent: int,
                   cfg: Optional[PaymentConfig] = None) -> Fraction:
    """Smallest report at which ``agent`` still wins, other fields fixed.

    Bisection returns the winning end of an interval narrower than
    ``cfg.delta``; breakpoint mode (max-value oracle only) is exact.
    """
    cfg = cfg or PaymentConfig()
    if not allocator.monotone:
        raise DisallowedAllocator(
            f"{allocator} is not monotone; no critical values exist")
    if agent not in allocator(inst).selected:
        raise MechanismError("no critical value: loser")
    if cfg.mode == "breakpoint":
        if allocator.oracle.tag != "max_value":
            raise MechanismError("breakpoint payments need the max_value oracle")
        return _breakpoint(inst, allocator, agent)
    return _bisection(inst, allocator, agent, cfg.delta)


def run_mechanism(inst: Instance, allocator: Allocator,
                  cfg: Optional[PaymentConfig] = None) -> Outcome:
    if not allocator.monotone:
        raise DisallowedAllocator(
            f"{allocator} is refused: iterating MaxGreedy is not monotone "
            "(run the counterexample command for a witness)")
    cfg = cfg or PaymentConfig()
    a = allocator(inst)
    pay = {i: critical_value(inst, allocator, i, cfg) for i in sorted(a.selected)}
    return Outcome(a, pay)


def utility(inst_true: Instance, outcome: Outcome, agent: int) -> Fraction:
    """Quasilinear utility under the agent's true bid."""
    if agent in outcome.assignment.selected:
        return inst_true.bids[agent].value - outcome.payment(agent)
    return Fraction(0)
