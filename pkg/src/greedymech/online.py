"""Online iterative packing: bins are time slots, items expire."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import Assignment, Bid, Instance, InstanceError, validate_instance
from .packing import OracleKind, project


@dataclass(frozen=True)
class SlotEvent:
    slot: int
    present: frozenset
    chosen: frozenset


class OnlineAllocator:
    """Slot-by-slot allocator that only ever sees bids revealed so far.

    Feed each slot with :meth:`step`, passing the bids whose arrival has come
    (each bid is revealed exactly once). Decisions are irrevocable.
    """

    def __init__(self, bins, oracle: OracleKind):
        self.bins = list(bins)
        self.oracle = oracle
        self.known: dict[int, Bid] = {}
        self.taken: set[int] = set()
        self.trace: list[SlotEvent] = []
        self._next = 0

    def step(self, revealed: Iterable[Bid]) -> SlotEvent:
        spec = self.bins[self._next]
        t = spec.slot
        for b in revealed:
            if b.arrival > t:
                raise ValueError(f"item {b.agent_id} revealed before its arrival")
            self.known[b.agent_id] = b
        present = [b for i, b in sorted(self.known.items())
                   if i not in self.taken and b.arrival <= t <= b.departure]
        res = self.oracle(project(present, spec.bin_id), spec.capacity)
        self.taken |= res.selected
        ev = SlotEvent(t, frozenset(b.agent_id for b in present), res.selected)
        self.trace.append(ev)
        self._next += 1
        return ev


def simulate_online(inst: Instance, oracle: OracleKind):
    """Run the online allocator over ``inst`` in slot order.

    Returns ``(assignment, trace)``; bids are revealed to the allocator at
    the first slot not earlier than their arrival.
    """
    if not inst.online:
        raise InstanceError("simulate_online needs an online instance")
    pending = sorted(inst.bids, key=lambda b: (b.arrival, b.agent_id))
    alloc = OnlineAllocator(inst.bins, oracle)
    k = 0
    for spec in inst.bins:
        batch = []
        while k < len(pending) and pending[k].arrival <= spec.slot:
            batch.append(pending[k])
            k += 1
        alloc.step(batch)
    per_bin = tuple(ev.chosen for ev in alloc.trace)
    return Assignment(per_bin, oracle_calls=len(per_bin)), alloc.trace


def _require_unit(inst: Instance) -> None:
    one = Fraction(1)
    for b in inst.bids:
        if b.size != one or b.size_vector is not None:
            raise InstanceError(f"item {b.agent_id}: dynamic auction needs unit sizes")
    for s in inst.bins:
        if s.capacity != one:
            raise InstanceError(f"bin {s.bin_id}: dynamic auction needs unit capacity")


def dynamic_auction(inst: Instance) -> Assignment:
    """Each slot sells one unit to the most valuable present bidder."""
    validate_instance(inst)
    _require_unit(inst)
    return simulate_online(inst, OracleKind("max_value"))[0]


def dynamic_multi_auction(inst: Instance, eps: Fraction) -> Assignment:
    """Each slot runs the monotone FPTAS over the present bidders."""
    validate_instance(inst)
    return simulate_online(inst, OracleKind("fptas", Fraction(eps)))[0]
