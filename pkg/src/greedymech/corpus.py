"""Seed-addressed random instances on small rational grids."""
from __future__ import annotations

import os
import random
from fractions import Fraction

from .core import BinSpec, Instance, make_bid, validate_instance

DEFAULT_SEED = 0


def default_seed() -> int:
    return int(os.environ.get("GM_SEED", DEFAULT_SEED))


def _value(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(1, 40), 4)


def _size(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(1, 8), 8)


def random_knapsack(rng: random.Random, max_items: int = 12) -> Instance:
    n = rng.randint(1, max_items)
    bids = tuple(make_bid(i, _value(rng), _size(rng) * 2) for i in range(n))
    return validate_instance(Instance(bids, (BinSpec(0, Fraction(rng.randint(2, 8), 2)),)))


def random_multiknapsack(rng: random.Random, max_items: int = 10, max_bins: int = 3,
                         identical: bool = False, gap: bool = False) -> Instance:
    n = rng.randint(1, max_items)
    m = rng.randint(1, max_bins)
    if identical:
        caps = [Fraction(rng.randint(2, 6), 2)] * m
    else:
        caps = [Fraction(rng.randint(2, 6), 2) for _ in range(m)]
    bids = []
    for i in range(n):
        if gap:
            sizes = [_size(rng) * 2 for _ in range(m)]
            bids.append(make_bid(i, _value(rng), max(sizes), sizes=sizes))
        else:
            bids.append(make_bid(i, _value(rng), _size(rng) * 2))
    bins = tuple(BinSpec(j, c) for j, c in enumerate(caps))
    return validate_instance(Instance(tuple(bids), bins))


def random_online(rng: random.Random, max_items: int = 8, max_slots: int = 8,
                  unit: bool = True) -> Instance:
    n = rng.randint(1, max_items)
    m = rng.randint(1, max_slots)
    bids = []
    for i in range(n):
        a = rng.randint(1, m)
        d = rng.randint(a, m)
        size = Fraction(1) if unit else _size(rng) * 2
        bids.append(make_bid(i, _value(rng), size, arrival=a, departure=d))
    caps = [Fraction(1) if unit else Fraction(rng.randint(2, 6), 2) for _ in range(m)]
    bins = tuple(BinSpec(j, c, j + 1) for j, c in enumerate(caps))
    return validate_instance(Instance(tuple(bids), bins, online=True))


KINDS = {
    "knapsack": random_knapsack,
    "multi": random_multiknapsack,
    "identical": lambda rng, **kw: random_multiknapsack(rng, identical=True, **kw),
    "gap": lambda rng, **kw: random_multiknapsack(rng, gap=True, **kw),
    "online": random_online,
    "online_multi": lambda rng, **kw: random_online(rng, unit=False, **kw),
}


def generate_corpus(seed: int, count: int, kind: str = "multi", **kw) -> list[Instance]:
    """``count`` instances of ``kind``; the same ``(seed, count, kind)``
    always yields the same list."""
    rng = random.Random(f"{kind}:{seed}")
    gen = KINDS[kind]
    return [gen(rng, **kw) for _ in range(count)]
