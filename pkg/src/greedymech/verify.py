"""Property checkers: monotonicity, loser-independence, bitonicity,
stability, and approximation-ratio reports.

Every check replays the target on perturbed copies of an instance. The
improvement sets are finite grids plus probes placed around a loser's
winning threshold; a failing report carries a witness that reproduces the
divergence on its own (see :func:`replay`).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .allocators import Allocator, as_allocator
from .core import Assignment, Bid, Instance, InstanceError, improves, make_instance
from .packing import OracleKind

DELTA = Fraction(1, 100)


@dataclass(frozen=True)
class PerturbationGrid:
    value_steps: tuple = (Fraction(1), 1 + DELTA, Fraction(2), Fraction(10))
    size_steps: tuple = (Fraction(1), 1 - DELTA, Fraction(1, 2))
    arrival_shifts: tuple = (0, 1, 2)
    departure_shifts: tuple = (0, 1, 2)
    threshold_probes: bool = True
    probe_delta: Fraction = Fraction(1, 10 ** 6)

    def improvements(self, bid: Bid, slot_range=None) -> list[Bid]:
        """Every grid point that improves ``bid``, identity excluded."""
        out = []
        sizes = self.size_steps if bid.size_vector is None else (Fraction(1),)
        timed = slot_range is not None and bid.arrival is not None
        arr = self.arrival_shifts if timed else (0,)
        dep = self.departure_shifts if timed else (0,)
        seen = set()
        for vs, ss, da, dd in itertools.product(self.value_steps, sizes, arr, dep):
            new = replace(bid, value=bid.value * vs, size=bid.size * ss)
            if timed:
                lo, hi = slot_range
                a = max(bid.arrival - da, min(lo, bid.arrival))
                d = min(bid.departure + dd, max(hi, bid.departure))
                new = replace(new, arrival=a, departure=d)
            if new == bid or new in seen or not improves(bid, new):
                continue
            seen.add(new)
            out.append(new)
        return out


@dataclass(frozen=True)
class Witness:
    agent_id: int
    old_bid: Bid
    new_bid: Bid
    old_output: Assignment
    new_output: Assignment


@dataclass
class PropertyReport:
    property: str
    passed: bool
    trials: int = 0
    witness: Optional[Witness] = None
    notes: list = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"


def replay(target, inst: Instance, witness: Witness) -> tuple[Assignment, Assignment]:
    """Re-run a witness from scratch; returns the two outputs."""
    alloc = as_allocator(target)
    before = alloc(inst.with_bid(witness.old_bid))
    after = alloc(inst.with_bid(witness.new_bid))
    return before, after


def _slot_range(inst: Instance):
    if not inst.online or not inst.bins:
        return None
    return inst.bins[0].slot, inst.bins[-1].slot


def _agents(inst: Instance, agents: Optional[Iterable[int]]):
    return range(inst.n) if agents is None else list(agents)


def loser_threshold(alloc: Allocator, inst: Instance, agent: int,
                    precision: Fraction) -> Optional[Fraction]:
    """Approximate smallest winning value for a currently losing agent, or
    ``None`` if it cannot win even with a dominant value."""
    bid = inst.bids[agent]
    ceiling = 2 * sum((b.value for b in inst.bids), Fraction(0)) + 1

    def wins(v):
        return agent in alloc(inst.with_bid(bid.with_value(v))).selected

    if not wins(ceiling):
        return None
    lo, hi = bid.value, ceiling
    while hi - lo >= precision:
        mid = (lo + hi) / 2
        if wins(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _threshold_bids(alloc, inst, agent, grid: PerturbationGrid) -> list[Bid]:
    bid = inst.bids[agent]
    t = loser_threshold(alloc, inst, agent, grid.probe_delta)
    if t is None:
        return []
    vals = {(bid.value + t) / 2, t - grid.probe_delta, t, t + grid.probe_delta}
    return [bid.with_value(v) for v in sorted(vals) if v > bid.value]


def check_monotone(target, inst: Instance, grid: Optional[PerturbationGrid] = None,
                   agents: Optional[Iterable[int]] = None) -> PropertyReport:
    """Every winner must keep winning under every grid improvement."""
    grid = grid or PerturbationGrid()
    alloc = as_allocator(target)
    base = alloc(inst)
    rep = PropertyReport("monotone", True)
    for i in _agents(inst, agents):
        if i not in base.selected:
            continue
        for new in grid.improvements(inst.bids[i], _slot_range(inst)):
            out = alloc(inst.with_bid(new))
            rep.trials += 1
            if i not in out.selected:
                rep.passed = False
                rep.witness = Witness(i, inst.bids[i], new, base, out)
                return rep
    return rep


def check_loser_independent(target, inst: Instance,
                            grid: Optional[PerturbationGrid] = None,
                            agents: Optional[Iterable[int]] = None) -> PropertyReport:
    """An improving loser must either win or leave the whole output as is."""
    grid = grid or PerturbationGrid()
    alloc = as_allocator(target)
    base = alloc(inst)
    rep = PropertyReport("loser_independent", True)
    for i in _agents(inst, agents):
        if i in base.selected:
            continue
        cands = grid.improvements(inst.bids[i], _slot_range(inst))
        if grid.threshold_probes:
            cands += _threshold_bids(alloc, inst, i, grid)
        for new in cands:
            out = alloc(inst.with_bid(new))
            rep.trials += 1
            if i not in out.selected and out != base:
                rep.passed = False
                rep.witness = Witness(i, inst.bids[i], new, base, out)
                return rep
    return rep


def check_bitonic(target, inst: Instance, agent: int,
                  value_grid: Sequence[Fraction]) -> PropertyReport:
    """Sweep one agent's value upward: total output value may not rise while
    the agent loses nor fall while it wins (and a winner may not turn into a
    loser)."""
    alloc = as_allocator(target)
    if any(b <= a for a, b in zip(value_grid, value_grid[1:])):
        raise ValueError("value_grid must be strictly ascending")
    rep = PropertyReport("bitonic", True)
    prev = None
    for v in value_grid:
        probe = inst.with_bid(inst.bids[agent].with_value(v))
        out = alloc(probe)
        rep.trials += 1
        won, total = agent in out.selected, probe.value_of(out.selected)
        if prev is not None:
            pv, pout, pwon, ptotal = prev
            bad = (pwon and not won) or (not pwon and not won and total > ptotal) \
                or (pwon and won and total < ptotal)
            if bad:
                rep.passed = False
                rep.witness = Witness(agent, inst.bids[agent].with_value(pv),
                                      inst.bids[agent].with_value(v), pout, out)
                return rep
        prev = (v, out, won, total)
    return rep


STABILITY_VALUE_STEPS = (Fraction(0), Fraction(1, 2), 1 - DELTA, Fraction(1),
                         1 + DELTA, Fraction(2), Fraction(10))
STABILITY_SIZE_STEPS = (Fraction(1, 2), Fraction(1), Fraction(2))


def check_stability(target, inst: Instance,
                    agents: Optional[Iterable[int]] = None) -> PropertyReport:
    """If an agent's own allocation survives a change of its bid, nobody
    else's allocation may move."""
    alloc = as_allocator(target)
    base = alloc(inst)
    rep = PropertyReport("stable", True)
    for i in _agents(inst, agents):
        bid = inst.bids[i]
        sizes = STABILITY_SIZE_STEPS if bid.size_vector is None else (Fraction(1),)
        for vs, ss in itertools.product(STABILITY_VALUE_STEPS, sizes):
            new = replace(bid, value=bid.value * vs, size=bid.size * ss)
            if new == bid:
                continue
            out = alloc(inst.with_bid(new))
            rep.trials += 1
            if out.bin_of(i) != base.bin_of(i):
                continue
            if any(out.bin_of(k) != base.bin_of(k) for k in range(inst.n) if k != i):
                rep.passed = False
                rep.witness = Witness(i, bid, new, base, out)
                return rep
    return rep


# -- ratios -----------------------------------------------------------------

def exp_interval(x: Fraction, terms: int = 30) -> tuple[Fraction, Fraction]:
    """Rational bounds ``lo <= e**x <= hi`` for rational ``0 <= x < 1``."""
    x = Fraction(x)
    if not 0 <= x < 1:
        raise ValueError("exp_interval expects 0 <= x < 1")
    term, total = Fraction(1), Fraction(1)
    for k in range(1, terms + 1):
        term = term * x / k
        total += term
    # tail <= next_term / (1 - x/(terms+2))
    nxt = term * x / (terms + 1)
    tail = nxt / (1 - x / (terms + 2))
    return total, total + tail


def exp_bounds(x: Fraction, terms: int = 30) -> tuple[Fraction, Fraction]:
    """Rational bounds on e**x for any rational x >= 0."""
    x = Fraction(x)
    whole = math.floor(x)
    lo, hi = exp_interval(x - whole, terms)
    if whole:
        half_lo, half_hi = exp_interval(Fraction(1, 2), terms)
        lo *= half_lo ** (2 * whole)
        hi *= half_hi ** (2 * whole)
    return lo, hi


def identical_bins_bound(alpha: Fraction, terms: int = 30) -> tuple[Fraction, Fraction]:
    """Interval around e^(1/alpha) / (e^(1/alpha) - 1), the worst ratio of
    iterative packing over identical bins with an alpha-approximate oracle."""
    lo, hi = exp_bounds(1 / Fraction(alpha), terms)
    # E/(E-1) is decreasing in E
    return hi / (hi - 1), lo / (lo - 1)


@dataclass
class RatioReport:
    worst: Optional[Fraction]
    bound: Fraction
    instances: int
    violations: list = field(default_factory=list)
    ratios: list = field(default_factory=list)
    undecided: int = 0

    @property
    def passed(self) -> bool:
        return not self.violations


def ratio_report(corpus: Sequence[Instance], allocator,
                 opt: Callable[[Instance], Fraction],
                 bound) -> RatioReport:
    """Worst OPT/ALG over ``corpus``.

    ``bound`` is a Fraction, or a ``(lo, hi)`` pair bracketing an irrational
    bound; an instance violates when its ratio exceeds ``hi``. Ratios between
    ``lo`` and ``hi`` are counted as undecided (never happens for the bounds
    used here at 30 series terms).
    """
    alloc = as_allocator(allocator)
    lo, hi = (bound, bound) if isinstance(bound, Fraction) else bound
    rep = RatioReport(None, hi, len(corpus))
    for idx, inst in enumerate(corpus):
        best = opt(inst)
        got = inst.value_of(alloc(inst).selected)
        if best == 0:
            ratio = Fraction(1)
        elif got == 0:
            rep.violations.append((idx, None, inst))
            rep.ratios.append(None)
            continue
        else:
            ratio = best / got
        rep.ratios.append(ratio)
        if rep.worst is None or ratio > rep.worst:
            rep.worst = ratio
        if ratio > hi:
            rep.violations.append((idx, ratio, inst))
        elif ratio > lo:
            rep.undecided += 1
    return rep


# -- the MaxGreedy counterexample ----------------------------------------------

def counterexample_instance(eps: Fraction) -> Instance:
    """Two unit bins where iterating MaxGreedy is not monotone."""
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 6):
        raise ValueError("the counterexample needs 0 < eps < 1/6")
    h, q = Fraction(1, 2), Fraction(1, 4)
    items = [(1 + eps, h), (1 + eps, h), (Fraction(3, 2), Fraction(3, 4)),
             (h, q), (2 - eps, 1), (2 - eps, 1)]
    return make_instance(items, [1, 1])


COUNTEREXAMPLE_AGENT = 3


def max_greedy_counterexample(eps: Fraction) -> tuple[Instance, PropertyReport]:
    """Raise the quarter-size item's value from 1/2 to 1/2 + eps and watch it
    drop out of the iterated MaxGreedy allocation."""
    inst = counterexample_instance(eps)
    eps = Fraction(eps)
    grid = PerturbationGrid(value_steps=(1 + 2 * eps,), size_steps=(Fraction(1),))
    rep = check_monotone(Allocator("iterative", OracleKind("max_greedy")), inst,
                         grid, agents=[COUNTEREXAMPLE_AGENT])
    return inst, rep
