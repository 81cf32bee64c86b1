"""Exact-arithmetic domain types shared by every allocator.

All numbers are :class:`fractions.Fraction`; nothing in the allocation path
ever touches a float, so ties and threshold comparisons are deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

Number = Union[int, str, Fraction]


class InstanceError(ValueError):
    """An instance (or a bid inside it) violates a structural invariant."""


def to_fraction(x: Number) -> Fraction:
    """Convert an int, a ``"p/q"`` string or a Fraction to a Fraction.

    Floats are refused: a float literal such as ``0.1`` is not the rational
    the caller probably meant.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected int, str or Fraction, got {type(x).__name__}")


@dataclass(frozen=True)
class Bid:
    """A single-minded agent's declaration.

    ``size_vector`` (one entry per bin) supersedes ``size`` when present.
    ``arrival``/``departure`` are only used by online instances.
    """

    agent_id: int
    value: Fraction
    size: Fraction
    size_vector: Optional[tuple[Fraction, ...]] = None
    arrival: Optional[int] = None
    departure: Optional[int] = None

    def size_in(self, bin_id: int) -> Fraction:
        if self.size_vector is not None:
            return self.size_vector[bin_id]
        return self.size

    def with_value(self, value: Fraction) -> "Bid":
        return replace(self, value=value)


def make_bid(agent_id: int, value: Number, size: Number = 1, *,
             sizes: Optional[Iterable[Number]] = None,
             arrival: Optional[int] = None,
             departure: Optional[int] = None) -> Bid:
    vec = None if sizes is None else tuple(to_fraction(s) for s in sizes)
    return Bid(agent_id, to_fraction(value), to_fraction(size), vec,
               arrival, departure)


@dataclass(frozen=True)
class BinSpec:
    bin_id: int
    capacity: Fraction
    slot: Optional[int] = None


@dataclass(frozen=True)
class Instance:
    bids: tuple[Bid, ...]
    bins: tuple[BinSpec, ...]
    bin_budget: Optional[int] = None
    online: bool = False

    @property
    def n(self) -> int:
        return len(self.bids)

    @property
    def m(self) -> int:
        return len(self.bins)

    def with_bid(self, bid: Bid) -> "Instance":
        """Copy of the instance with ``bid`` replacing the same agent's bid."""
        bids = list(self.bids)
        bids[bid.agent_id] = bid
        return replace(self, bids=tuple(bids))

    def value_of(self, agents: Iterable[int]) -> Fraction:
        return sum((self.bids[i].value for i in agents), Fraction(0))


def make_instance(items: Sequence[tuple], capacities: Sequence[Number], *,
                  bin_budget: Optional[int] = None,
                  slots: Optional[Sequence[int]] = None,
                  online: bool = False) -> Instance:
    """Convenience constructor: ``items`` are ``(value, size)`` pairs, or
    ``(value, size, arrival, departure)`` for online instances."""
    bids = []
    for i, it in enumerate(items):
        if len(it) == 4:
            bids.append(make_bid(i, it[0], it[1], arrival=it[2], departure=it[3]))
        else:
            bids.append(make_bid(i, it[0], it[1]))
    bins = tuple(
        BinSpec(j, to_fraction(c), None if slots is None else slots[j])
        for j, c in enumerate(capacities)
    )
    return validate_instance(Instance(tuple(bids), bins, bin_budget, online))


@dataclass(frozen=True)
class Assignment:
    """Disjoint per-bin agent sets. ``oracle_calls`` is bookkeeping only and
    does not take part in equality."""

    per_bin: tuple[frozenset, ...]
    oracle_calls: int = field(default=0, compare=False)

    @classmethod
    def empty(cls, m: int) -> "Assignment":
        return cls(tuple(frozenset() for _ in range(m)))

    @property
    def selected(self) -> frozenset:
        return frozenset().union(*self.per_bin)

    def bin_of(self, agent_id: int) -> Optional[int]:
        for j, s in enumerate(self.per_bin):
            if agent_id in s:
                return j
        return None

    def as_lists(self) -> list[list[int]]:
        return [sorted(s) for s in self.per_bin]


def validate_instance(inst: Instance) -> Instance:
    """Return ``inst`` unchanged if every invariant holds, else raise
    :class:`InstanceError` naming the first offending item or bin."""
    m = len(inst.bins)
    for j, b in enumerate(inst.bins):
        if b.bin_id != j:
            raise InstanceError(f"bin {j}: bin_id {b.bin_id} is not dense")
        if not isinstance(b.capacity, Fraction):
            raise InstanceError(f"bin {j}: capacity is not a rational")
        if b.capacity <= 0:
            raise InstanceError(f"bin {j}: nonpositive capacity")
    for i, bid in enumerate(inst.bids):
        if bid.agent_id != i:
            raise InstanceError(f"item {i}: agent_id {bid.agent_id} is not dense")
        if not isinstance(bid.value, Fraction) or not isinstance(bid.size, Fraction):
            raise InstanceError(f"item {i}: value/size must be rationals")
        if bid.value < 0:
            raise InstanceError(f"item {i}: negative value")
        if bid.size <= 0:
            raise InstanceError(f"item {i}: nonpositive size")
        if bid.size_vector is not None:
            if len(bid.size_vector) != m:
                raise InstanceError(
                    f"item {i}: sizes has {len(bid.size_vector)} entries, expected {m}")
            for j, s in enumerate(bid.size_vector):
                if s <= 0:
                    raise InstanceError(f"item {i}: nonpositive size in bin {j}")
        if bid.arrival is not None and bid.departure is not None \
                and bid.arrival > bid.departure:
            raise InstanceError(
                f"item {i}: arrival {bid.arrival} after departure {bid.departure}")
    if inst.bin_budget is not None and not 0 <= inst.bin_budget <= m:
        raise InstanceError(f"bin_budget {inst.bin_budget} outside 0..{m}")
    if inst.online:
        for i, bid in enumerate(inst.bids):
            if bid.arrival is None or bid.departure is None:
                raise InstanceError(f"item {i}: online item needs arrival and departure")
        prev = None
        for j, b in enumerate(inst.bins):
            if b.slot is None:
                raise InstanceError(f"bin {j}: online bin needs a slot")
            if prev is not None and b.slot <= prev:
                raise InstanceError(f"bin {j}: slots must be strictly increasing")
            prev = b.slot
    return inst


def assignment_value(a: Assignment, inst: Instance) -> Fraction:
    return inst.value_of(a.selected)


def is_feasible(a: Assignment, inst: Instance) -> bool:
    seen: set[int] = set()
    for j, s in enumerate(a.per_bin):
        if seen & s:
            return False
        seen |= s
        load = sum((inst.bids[i].size_in(j) for i in s), Fraction(0))
        if load > inst.bins[j].capacity:
            return False
    return True


def improves(old: Bid, new: Bid) -> bool:
    """True iff ``new`` is at least as good a bid as ``old`` for the agent:
    no larger size, no smaller value, and (when timed) a window that
    contains the old one."""
    if new.size > old.size or new.value < old.value:
        return False
    if old.size_vector is not None or new.size_vector is not None:
        if old.size_vector is None or new.size_vector is None:
            return False
        if len(old.size_vector) != len(new.size_vector):
            return False
        if any(n > o for n, o in zip(new.size_vector, old.size_vector)):
            return False
    if old.arrival is not None and new.arrival is not None and new.arrival > old.arrival:
        return False
    if old.departure is not None and new.departure is not None \
            and new.departure < old.departure:
        return False
    return True
