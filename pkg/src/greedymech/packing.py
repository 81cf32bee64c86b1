"""Multi-bin allocators built from a single-bin oracle."""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Sequence

from .core import Assignment, Bid, Instance, InstanceError, to_fraction
from .oracles import (
    FptasConfig,
    OracleResult,
    exact_oracle,
    half_greedy,
    max_greedy,
    max_value_oracle,
    monotone_fptas,
)

ORACLE_TAGS = ("max_greedy", "half_greedy", "fptas", "max_value", "exact")
_CLI_NAMES = {
    "maxgreedy": "max_greedy",
    "halfgreedy": "half_greedy",
    "maxvalue": "max_value",
    "fptas": "fptas",
    "exact": "exact",
}


@dataclass(frozen=True)
class OracleKind:
    tag: str
    eps: Optional[Fraction] = None

    def __post_init__(self):
        if self.tag not in ORACLE_TAGS:
            raise ValueError(f"unknown oracle {self.tag!r}")
        if self.tag == "fptas":
            if self.eps is None or not 0 < self.eps < 1:
                raise ValueError("fptas oracle needs eps in (0, 1)")
        elif self.eps is not None:
            raise ValueError(f"oracle {self.tag} takes no eps")

    @classmethod
    def parse(cls, text: str) -> "OracleKind":
        """Parse ``maxgreedy``, ``halfgreedy``, ``maxvalue``, ``exact`` or
        ``fptas:EPS`` (underscored tags are accepted too)."""
        name, _, arg = text.strip().partition(":")
        tag = _CLI_NAMES.get(name.replace("_", ""), name)
        if tag == "fptas":
            if not arg:
                raise ValueError("fptas needs an epsilon, e.g. fptas:1/2")
            return cls("fptas", to_fraction(arg))
        if arg:
            raise ValueError(f"oracle {name} takes no argument")
        return cls(tag)

    def __str__(self) -> str:
        name = {v: k for k, v in _CLI_NAMES.items()}[self.tag]
        return f"{name}:{self.eps}" if self.tag == "fptas" else name

    def approx_factor(self) -> Fraction:
        """Worst-case single-bin ratio OPT/ALG of this oracle (knapsack)."""
        if self.tag in ("max_greedy", "half_greedy"):
            return Fraction(2)
        if self.tag == "fptas":
            return 1 / (1 - self.eps)
        if self.tag == "exact":
            return Fraction(1)
        raise ValueError("max_value is only exact for unit-size, unit-capacity bins")

    def __call__(self, bids: Sequence[Bid], capacity: Fraction) -> OracleResult:
        if self.tag == "max_greedy":
            return max_greedy(bids, capacity)
        if self.tag == "half_greedy":
            return half_greedy(bids, capacity)
        if self.tag == "max_value":
            return max_value_oracle(bids, capacity)
        if self.tag == "exact":
            return exact_oracle(bids, capacity)
        return monotone_fptas(bids, capacity, FptasConfig(self.eps))


def project(bids: Sequence[Bid], bin_id: int) -> list[Bid]:
    """Bids with ``size`` replaced by their size in ``bin_id``."""
    return [b if b.size_vector is None else replace(b, size=b.size_vector[bin_id])
            for b in bids]


def iterative_pack(inst: Instance, oracle: OracleKind) -> Assignment:
    """Pack bins in index order, each with the oracle over what is left."""
    taken: set[int] = set()
    per_bin = []
    for j, spec in enumerate(inst.bins):
        rest = [b for b in inst.bids if b.agent_id not in taken]
        res = oracle(project(rest, j), spec.capacity)
        per_bin.append(res.selected)
        taken |= res.selected
    return Assignment(tuple(per_bin), oracle_calls=len(inst.bins))


def gap_iterative_pack(inst: Instance, oracle: OracleKind) -> Assignment:
    """Iterative packing where every bid carries its own per-bin sizes."""
    for b in inst.bids:
        if b.size_vector is None or len(b.size_vector) != inst.m:
            raise InstanceError(f"item {b.agent_id}: missing per-bin sizes")
    return iterative_pack(inst, oracle)


def global_greedy_pack(inst: Instance, oracle: OracleKind) -> Assignment:
    """Each round, try every still-empty bin and commit the most valuable
    packing; at most ``bin_budget`` bins are used."""
    budget = inst.m if inst.bin_budget is None else inst.bin_budget
    per_bin = [frozenset() for _ in inst.bins]
    open_bins = list(range(inst.m))
    taken: set[int] = set()
    calls = 0
    for _ in range(budget):
        rest = [b for b in inst.bids if b.agent_id not in taken]
        best_j, best = None, None
        best_val = Fraction(0)
        for j in open_bins:
            res = oracle(project(rest, j), inst.bins[j].capacity)
            calls += 1
            val = inst.value_of(res.selected)
            if best_j is None or val > best_val:
                best_j, best, best_val = j, res.selected, val
        if best_j is None or best_val <= 0:
            break
        per_bin[best_j] = best
        taken |= best
        open_bins.remove(best_j)
    return Assignment(tuple(per_bin), oracle_calls=calls)
