"""A small descriptor naming "which composition with which oracle"."""
from __future__ import annotations

from dataclasses import dataclass

from .core import Assignment, Instance, InstanceError
from .online import simulate_online
from .packing import OracleKind, global_greedy_pack, iterative_pack, project

KINDS = ("single", "iterative", "global", "online")


@dataclass(frozen=True)
class Allocator:
    kind: str
    oracle: OracleKind

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown allocator {self.kind!r}")

    @classmethod
    def parse(cls, kind: str, oracle: str) -> "Allocator":
        return cls(kind, OracleKind.parse(oracle))

    def __str__(self) -> str:
        return f"{self.kind}+{self.oracle}"

    def __call__(self, inst: Instance) -> Assignment:
        if self.kind == "iterative":
            return iterative_pack(inst, self.oracle)
        if self.kind == "global":
            return global_greedy_pack(inst, self.oracle)
        if self.kind == "online":
            return simulate_online(inst, self.oracle)[0]
        # single: the bare oracle against bin 0; other bins stay empty
        if inst.m == 0:
            raise InstanceError("single-bin allocator needs at least one bin")
        res = self.oracle(project(inst.bids, 0), inst.bins[0].capacity)
        rest = tuple(frozenset() for _ in range(inst.m - 1))
        return Assignment((res.selected,) + rest, oracle_calls=1)

    @property
    def monotone(self) -> bool:
        """Whether this composition is on the truthful allow-list.

        MaxGreedy is refused everywhere: iterating it is provably not
        monotone, see :func:`greedymech.verify.max_greedy_counterexample`.
        """
        return self.oracle.tag != "max_greedy"


def as_allocator(target) -> Allocator:
    if isinstance(target, Allocator):
        return target
    if isinstance(target, OracleKind):
        return Allocator("single", target)
    if isinstance(target, str):
        return Allocator("single", OracleKind.parse(target))
    raise TypeError(f"cannot use {target!r} as an allocator")
