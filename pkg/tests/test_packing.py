from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from greedymech.allocators import Allocator, as_allocator
from greedymech.core import Instance, InstanceError, assignment_value, is_feasible, make_bid, make_instance
from greedymech.corpus import random_multiknapsack
from greedymech.packing import OracleKind, gap_iterative_pack, global_greedy_pack, iterative_pack

import random

MAXG = OracleKind.parse("maxgreedy")
EXACT = OracleKind.parse("exact")


def raised(inst, agent, value):
    return inst.with_bid(inst.bids[agent].with_value(value))


def test_iterative_max_greedy_first_bins(two_bin_instance):
    a = iterative_pack(two_bin_instance, MAXG)
    assert a.per_bin == (frozenset({0, 1}), frozenset({2, 3}))
    assert assignment_value(a, two_bin_instance) == F(42, 10)


def test_iterative_max_greedy_after_raise_drops_agent(two_bin_instance):
    inst = raised(two_bin_instance, 3, F(1, 2) + F(1, 10))
    a = iterative_pack(inst, MAXG)
    assert a.per_bin == (frozenset({4}), frozenset({5}))
    assert 3 not in a.selected


@pytest.mark.parametrize("name", ["maxgreedy", "halfgreedy", "maxvalue", "exact", "fptas:1/4"])
def test_single_bin_matches_oracle(three_items, name):
    oracle = OracleKind.parse(name)
    inst = Instance(tuple(three_items), make_instance([], [5]).bins)
    assert iterative_pack(inst, oracle).per_bin == (oracle(three_items, F(5)).selected,)
    assert global_greedy_pack(inst, oracle).per_bin == iterative_pack(inst, oracle).per_bin


def gap_instance():
    bids = (make_bid(0, 2, 1, sizes=[1, F(1, 2)]), make_bid(1, 2, 1, sizes=[F(1, 2), 1]))
    return Instance(bids, make_instance([], [1, 1]).bins)


def test_gap_example():
    a = gap_iterative_pack(gap_instance(), EXACT)
    # both fit bin 0 alone; the smaller per-bin size wins the tie
    assert a.per_bin == (frozenset({1}), frozenset({0}))
    assert assignment_value(a, gap_instance()) == 4


def test_gap_uniform_vectors_match_iterative(two_bin_instance):
    from dataclasses import replace
    vec = tuple(replace(b, size_vector=(b.size, b.size)) for b in two_bin_instance.bids)
    inst = replace(two_bin_instance, bids=vec)
    for name in ["maxgreedy", "halfgreedy", "fptas:1/2"]:
        o = OracleKind.parse(name)
        assert gap_iterative_pack(inst, o) == iterative_pack(two_bin_instance, o)


def test_gap_bid_infeasible_everywhere_never_selected():
    bids = (make_bid(0, 100, 3, sizes=[3, 3]), make_bid(1, 1, 1, sizes=[1, 1]))
    inst = Instance(bids, make_instance([], [1, 1]).bins)
    for name in ["halfgreedy", "maxvalue", "exact", "fptas:1/2"]:
        assert 0 not in gap_iterative_pack(inst, OracleKind.parse(name)).selected


def test_gap_missing_vector_rejected(two_bin_instance):
    with pytest.raises(InstanceError, match="per-bin sizes"):
        gap_iterative_pack(two_bin_instance, EXACT)


def test_global_budget_one_picks_best_bin():
    inst = make_instance([(3, 1), (4, 2)], [1, 2], bin_budget=1)
    a = global_greedy_pack(inst, EXACT)
    assert a.per_bin == (frozenset(), frozenset({1}))
    assert assignment_value(a, inst) == 4


def test_global_budget_zero_is_empty():
    inst = make_instance([(3, 1), (4, 2)], [1, 2], bin_budget=0)
    assert global_greedy_pack(inst, EXACT).selected == frozenset()


def test_oracle_call_counts(two_bin_instance):
    assert iterative_pack(two_bin_instance, MAXG).oracle_calls == 2
    rng = random.Random("calls")
    for _ in range(40):
        inst = random_multiknapsack(rng)
        budget = inst.m if inst.bin_budget is None else inst.bin_budget
        assert global_greedy_pack(inst, EXACT).oracle_calls <= budget * inst.m


def test_allocator_names_and_dispatch(two_bin_instance):
    alloc = Allocator.parse("iterative", "maxgreedy")
    assert str(alloc) == "iterative+maxgreedy"
    assert not alloc.monotone
    assert Allocator.parse("global", "halfgreedy").monotone
    assert alloc(two_bin_instance) == iterative_pack(two_bin_instance, MAXG)
    assert as_allocator("exact") == Allocator("single", EXACT)
    with pytest.raises(ValueError):
        Allocator("sideways", EXACT)


def test_oracle_kind_parse_round_trip():
    for name in ["maxgreedy", "halfgreedy", "maxvalue", "exact", "fptas:1/8"]:
        assert str(OracleKind.parse(name)) == name
    assert OracleKind.parse("fptas:1/8").approx_factor() == F(8, 7)
    for bad in ["fptas:2", "fptas", "greedy"]:
        with pytest.raises(ValueError):
            OracleKind.parse(bad)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["maxgreedy", "halfgreedy", "maxvalue", "exact", "fptas:1/2"]),
       st.sampled_from(["iterative", "global"]))
def test_compositions_disjoint_and_feasible(seed, oracle, kind):
    inst = random_multiknapsack(random.Random(seed))
    a = Allocator.parse(kind, oracle)(inst)
    assert sum(len(s) for s in a.per_bin) == len(a.selected)
    assert is_feasible(a, inst)
