import random
from dataclasses import replace
from fractions import Fraction as F

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from greedymech.baselines import brute_opt_online
from greedymech.core import InstanceError, assignment_value, make_instance
from greedymech.corpus import random_online
from greedymech.online import OnlineAllocator, dynamic_auction, dynamic_multi_auction, simulate_online
from greedymech.packing import OracleKind

MAXV = OracleKind.parse("maxvalue")


def ab_instance():
    return make_instance([(5, 1, 1, 2), (3, 1, 1, 1)], [1, 1], slots=[1, 2], online=True)


def test_two_slot_example():
    inst = ab_instance()
    a, trace = simulate_online(inst, MAXV)
    assert trace[0].present == {0, 1} and trace[0].chosen == {0}
    assert trace[1].present == frozenset() and trace[1].chosen == frozenset()
    alg = assignment_value(a, inst)
    opt = brute_opt_online(inst)
    assert (alg, opt, opt / alg) == (5, 8, F(8, 5))
    assert dynamic_auction(inst) == a


def test_single_agent_selected_in_window():
    inst = make_instance([(2, 1, 2, 3)], [1, 1, 1], slots=[1, 2, 3], online=True)
    a, trace = simulate_online(inst, MAXV)
    assert a.bin_of(0) == 1
    assert trace[0].present == frozenset()


def test_departed_agent_never_considered():
    inst = make_instance([(2, 1, 1, 1), (1, 1, 2, 2)], [1], slots=[2], online=True)
    a, trace = simulate_online(inst, MAXV)
    assert trace[0].present == {1}
    assert a.selected == {1}


def test_offline_instance_rejected(two_bin_instance):
    with pytest.raises(InstanceError):
        simulate_online(two_bin_instance, MAXV)


def test_dynamic_auction_rejects_non_unit_sizes():
    inst = make_instance([(2, F(1, 2), 1, 1)], [1], slots=[1], online=True)
    with pytest.raises(InstanceError, match="unit"):
        dynamic_auction(inst)


def test_dynamic_auction_disjoint_windows_all_win():
    inst = make_instance([(1, 1, t, t) for t in (1, 2, 3)], [1, 1, 1], slots=[1, 2, 3], online=True)
    assert dynamic_auction(inst).per_bin == (frozenset({0}), frozenset({1}), frozenset({2}))


def test_dynamic_auction_shared_slot():
    inst = make_instance([(1, 1, 1, 1), (4, 1, 1, 1), (2, 1, 1, 1)], [1], slots=[1], online=True)
    assert dynamic_auction(inst).selected == {1}


def test_dynamic_multi_one_slot():
    inst = make_instance([(6, 1, 1, 1), (10, 2, 1, 1), (12, 3, 1, 1)], [5], slots=[1], online=True)
    a = dynamic_multi_auction(inst, F(1, 2))
    assert assignment_value(a, inst) >= 11


def test_dynamic_multi_all_fit():
    inst = make_instance([(1, 1, 1, 2), (2, 1, 1, 2)], [3, 3], slots=[1, 2], online=True)
    assert dynamic_multi_auction(inst, F(1, 4)).per_bin[0] == {0, 1}


def test_dynamic_multi_one_item_per_full_slot():
    inst = make_instance([(1, 2, 1, 2), (3, 2, 1, 2), (2, 2, 1, 2)], [2, 2], slots=[1, 2], online=True)
    a = dynamic_multi_auction(inst, F(1, 4))
    assert a.per_bin == (frozenset({1}), frozenset({2}))


def test_reveal_before_arrival_refused():
    inst = ab_instance()
    alloc = OnlineAllocator(inst.bins, MAXV)
    with pytest.raises(ValueError):
        alloc.step([replace(inst.bids[0], arrival=2)])


def _matching_opt(inst):
    g = nx.Graph()
    for b in inst.bids:
        for spec in inst.bins:
            if b.arrival <= spec.slot <= b.departure:
                g.add_edge(("i", b.agent_id), ("s", spec.slot), weight=b.value)
    m = nx.max_weight_matching(g)
    return sum((g.edges[e]["weight"] for e in m), F(0))


def test_brute_opt_online_matches_matching():
    rng = random.Random("matching")
    for _ in range(150):
        inst = random_online(rng)
        assert brute_opt_online(inst) == _matching_opt(inst)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["maxvalue", "fptas:1/2", "halfgreedy"]),
       st.integers(1, 8))
def test_causality_future_bids_do_not_change_past(seed, oracle, cutoff):
    rng = random.Random(seed)
    inst = random_online(rng, unit=oracle == "maxvalue")
    o = OracleKind.parse(oracle)
    _, before = simulate_online(inst, o)
    bids = tuple(b if b.arrival <= cutoff else b.with_value(F(rng.randint(0, 80), 4))
                 for b in inst.bids)
    _, after = simulate_online(replace(inst, bids=bids), o)
    past = [k for k, spec in enumerate(inst.bins) if spec.slot <= cutoff]
    assert [before[k] for k in past] == [after[k] for k in past]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["maxvalue", "fptas:1/2"]))
def test_assignments_inside_windows(seed, oracle):
    inst = random_online(random.Random(seed), unit=oracle == "maxvalue")
    a, trace = simulate_online(inst, OracleKind.parse(oracle))
    for ev, spec in zip(trace, inst.bins):
        assert ev.chosen <= ev.present
        for i in ev.chosen:
            assert inst.bids[i].arrival <= spec.slot <= inst.bids[i].departure
