"""Exhaustive optima used as ground truth for ratio checks."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .core import Assignment, Bid, Instance

ZERO = Fraction(0)


class BoundExceeded(ValueError):
    pass


def brute_opt_knapsack(bids: Sequence[Bid], capacity: Fraction, max_items: int = 20):
    """Best subset by enumeration; ties go to the lexicographically smallest
    sorted tuple of agent ids. Returns ``(value, frozenset)``."""
    if len(bids) > max_items:
        raise BoundExceeded(f"{len(bids)} items exceed the enumeration bound {max_items}")
    order = sorted(bids, key=lambda b: b.agent_id)
    suffix = [ZERO] * (len(order) + 1)
    for i in range(len(order) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + order[i].value
    best_val, best_key = ZERO, ()

    def dfs(i, load, val, chosen):
        nonlocal best_val, best_key
        if val + suffix[i] < best_val:
            return
        if i == len(order):
            key = tuple(chosen)
            if val > best_val or (val == best_val and key < best_key):
                best_val, best_key = val, key
            return
        b = order[i]
        if load + b.size <= capacity:
            chosen.append(b.agent_id)
            dfs(i + 1, load + b.size, val + b.value, chosen)
            chosen.pop()
        dfs(i + 1, load, val, chosen)

    dfs(0, ZERO, ZERO, [])
    return best_val, frozenset(best_key)


def _best_assignment(inst: Instance, eligible) -> tuple[Fraction, Assignment]:
    # branch and bound over item -> {bin, none}; exact, with value-sum pruning
    order = sorted(inst.bids, key=lambda b: (-b.value, b.agent_id))
    suffix = [ZERO] * (len(order) + 1)
    for i in range(len(order) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + order[i].value
    loads = [ZERO] * inst.m
    where: list = [None] * inst.n
    best_val, best_where = ZERO, list(where)

    def dfs(i, val):
        nonlocal best_val, best_where
        if val + suffix[i] <= best_val and i < len(order):
            return
        if i == len(order):
            if val > best_val:
                best_val, best_where = val, list(where)
            return
        b = order[i]
        for j, spec in enumerate(inst.bins):
            if not eligible(b, spec):
                continue
            s = b.size_in(j)
            if loads[j] + s <= spec.capacity:
                loads[j] += s
                where[b.agent_id] = j
                dfs(i + 1, val + b.value)
                where[b.agent_id] = None
                loads[j] -= s
        dfs(i + 1, val)

    dfs(0, ZERO)
    per_bin = [set() for _ in range(inst.m)]
    for i, j in enumerate(best_where):
        if j is not None:
            per_bin[j].add(i)
    return best_val, Assignment(tuple(frozenset(s) for s in per_bin))


def brute_opt_multiknapsack(inst: Instance, max_items: int = 10, max_bins: int = 3):
    """Optimal offline assignment (per-bin sizes honoured)."""
    if inst.n > max_items or inst.m > max_bins:
        raise BoundExceeded(
            f"n={inst.n}, m={inst.m} exceed enumeration bounds ({max_items}, {max_bins})")
    return _best_assignment(inst, lambda b, spec: True)


def brute_opt_online(inst: Instance, max_items: int = 8, max_slots: int = 8) -> Fraction:
    """Offline optimum for an online instance: every item may go to any slot
    inside its window."""
    if inst.n > max_items or inst.m > max_slots:
        raise BoundExceeded(
            f"n={inst.n}, slots={inst.m} exceed enumeration bounds ({max_items}, {max_slots})")
    val, _ = _best_assignment(
        inst, lambda b, spec: b.arrival <= spec.slot <= b.departure)
    return val
