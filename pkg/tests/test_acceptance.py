"""End-to-end acceptance checks, one test per criterion.

Each test logs a single ``criterion N: PASS|FAIL - ...`` line, repeated in
the terminal summary.
"""
import io
import random
import subprocess
import sys
import time
from fractions import Fraction as F
from pathlib import Path

import pytest

from greedymech.allocators import Allocator
from greedymech.baselines import brute_opt_knapsack, brute_opt_multiknapsack, brute_opt_online
from greedymech.cli import main
from greedymech.corpus import generate_corpus
from greedymech.mechanism import DEFAULT_DELTA, PaymentConfig, critical_value, run_mechanism, wins_at
from greedymech.online import dynamic_auction, dynamic_multi_auction
from greedymech.oracles import FptasConfig, half_greedy, max_greedy, monotone_fptas
from greedymech.verify import (
    PerturbationGrid,
    check_bitonic,
    check_loser_independent,
    check_monotone,
    counterexample_instance,
    identical_bins_bound,
    ratio_report,
)

pytestmark = pytest.mark.acceptance
SEED = 2024


def test_criterion_1_counterexample(acceptance_log):
    t0 = time.perf_counter()
    out = io.StringIO()
    code = main(["counterexample", "--eps", "1/10", "--out", "/dev/null"], out)
    elapsed = time.perf_counter() - t0
    text = out.getvalue()
    expected = [
        "before bin 0: agents=[0, 1] items=(1/2, 11/10) (1/2, 11/10)",
        "before bin 1: agents=[2, 3] items=(3/4, 3/2) (1/4, 1/2)",
        "raise: value 1/2 -> 3/5",
        "after bin 0: agents=[4] items=(1, 19/10)",
        "after bin 1: agents=[5] items=(1, 19/10)",
        "verdict: FAIL",
    ]
    ok = code == 1 and all(line in text for line in expected) and elapsed < 1
    acceptance_log(1, ok, f"before and after allocations reproduced, monotone FAIL, {elapsed:.3f}s")
    assert ok


def test_criterion_2_single_bin_ratios(acceptance_log):
    t0 = time.perf_counter()
    corpus = generate_corpus(SEED, 500, "knapsack", max_items=12)
    violations = 0
    for inst in corpus:
        bids, cap = inst.bids, inst.bins[0].capacity
        opt, _ = brute_opt_knapsack(bids, cap)
        violations += inst.value_of(half_greedy(bids, cap).selected) < opt / 2
        violations += inst.value_of(max_greedy(bids, cap).selected) < opt / 2
        for eps in (F(1, 2), F(1, 4), F(1, 8)):
            got = inst.value_of(monotone_fptas(bids, cap, FptasConfig(eps)).selected)
            violations += got < (1 - eps) * opt
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and elapsed < 30
    acceptance_log(2, ok, f"{len(corpus)} knapsack instances, {violations} violations, {elapsed:.1f}s")
    assert ok


def test_criterion_3_composition_ratio(acceptance_log):
    t0 = time.perf_counter()
    corpus = generate_corpus(SEED, 300, "multi", max_items=10, max_bins=3)
    opts = {}

    def opt(inst):
        key = id(inst)
        if key not in opts:
            opts[key] = brute_opt_multiknapsack(inst)[0]
        return opts[key]

    reports = {"halfgreedy": ratio_report(corpus, Allocator.parse("iterative", "halfgreedy"), opt, F(3))}
    for eps in (F(1, 2), F(1, 8)):
        name = f"fptas:{eps}"
        reports[name] = ratio_report(corpus, Allocator.parse("iterative", name), opt, 2 + eps)
    elapsed = time.perf_counter() - t0
    bad = sum(len(r.violations) for r in reports.values())
    ok = bad == 0 and elapsed < 120
    worst = ", ".join(f"{k} worst {float(r.worst):.3f}" for k, r in reports.items())
    acceptance_log(3, ok, f"{len(corpus)} instances, {bad} violations ({worst}), {elapsed:.1f}s")
    assert ok


def test_criterion_4_identical_bins(acceptance_log):
    corpus = generate_corpus(SEED, 300, "identical", max_items=10, max_bins=3)
    opts = {id(inst): brute_opt_multiknapsack(inst)[0] for inst in corpus}
    half = ratio_report(corpus, Allocator.parse("iterative", "halfgreedy"),
                        lambda inst: opts[id(inst)], identical_bins_bound(F(2)))
    fptas = ratio_report(corpus, Allocator.parse("iterative", "fptas:1/8"),
                         lambda inst: opts[id(inst)], identical_bins_bound(F(8, 7)))
    ok = half.passed and fptas.passed and half.undecided == fptas.undecided == 0
    acceptance_log(4, ok, f"{len(corpus)} equal-capacity instances, halfgreedy worst "
                          f"{float(half.worst):.3f} <= {float(half.bound):.4f}, fptas:1/8 worst "
                          f"{float(fptas.worst):.3f} <= {float(fptas.bound):.4f}")
    assert ok


def test_criterion_5_property_suites(acceptance_log):
    knap = generate_corpus(SEED, 80, "knapsack", max_items=10)
    multi = generate_corpus(SEED, 80, "multi", max_items=8)
    trials, wrong = 0, []
    for oracle in ("halfgreedy", "fptas:1/2", "maxvalue", "maxgreedy"):
        for inst in knap:
            for check in (check_monotone, check_loser_independent):
                if oracle == "maxgreedy" and check is check_loser_independent:
                    continue
                rep = check(oracle, inst)
                trials += rep.trials
                if not rep.passed:
                    wrong.append((oracle, rep.property))
        if oracle != "maxgreedy":
            alloc = Allocator.parse("iterative", oracle)
            for inst in multi:
                rep = check_monotone(alloc, inst)
                trials += rep.trials
                if not rep.passed:
                    wrong.append((str(alloc), rep.property))
    for inst in knap[:30]:
        for i in range(inst.n):
            grid = [inst.bids[i].value * k / 8 for k in range(33)]
            rep = check_bitonic("maxgreedy", inst, i, grid)
            trials += rep.trials
            if not rep.passed:
                wrong.append(("maxgreedy", "bitonic"))
    witness = check_loser_independent("maxgreedy", counterexample_instance(F(1, 10)))
    trials += witness.trials
    ok = not wrong and witness.verdict == "FAIL" and trials >= 10_000
    acceptance_log(5, ok, f"{trials} perturbation trials, unexpected verdicts {wrong[:3]}, "
                          f"maxgreedy loser-independence on witness {witness.verdict}")
    assert ok


def test_criterion_6_online(acceptance_log):
    t0 = time.perf_counter()
    unit = generate_corpus(SEED, 300, "online", max_items=8, max_slots=8)
    multi = generate_corpus(SEED, 300, "online_multi", max_items=8, max_slots=4)
    bad = 0
    worst_unit = worst_multi = F(1)
    for inst in unit:
        alg, opt = inst.value_of(dynamic_auction(inst).selected), brute_opt_online(inst)
        bad += alg < opt / 2
        if alg:
            worst_unit = max(worst_unit, opt / alg)
    for inst in multi:
        alg = inst.value_of(dynamic_multi_auction(inst, F(1, 2)).selected)
        opt = brute_opt_online(inst)
        bad += alg < opt / F(5, 2)
        if alg:
            worst_multi = max(worst_multi, opt / alg)
    mono_fail = 0
    grid = PerturbationGrid()
    for inst in unit[:100]:
        mono_fail += not check_monotone(Allocator.parse("online", "maxvalue"), inst, grid).passed
    for inst in multi[:60]:
        mono_fail += not check_monotone(Allocator.parse("online", "fptas:1/2"), inst, grid).passed
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and mono_fail == 0 and elapsed < 120
    acceptance_log(6, ok, f"600 online instances, {bad} violations (worst {float(worst_unit):.3f} "
                          f"unit, {float(worst_multi):.3f} multi), {mono_fail} monotone failures, "
                          f"{elapsed:.1f}s")
    assert ok


def _grid(v):
    return [F(0), v / 4, v / 2, 3 * v / 4, v, 5 * v / 4, 2 * v]


def test_criterion_7_payments(acceptance_log):
    delta = DEFAULT_DELTA
    corpus = generate_corpus(SEED, 100, "multi", max_items=6)
    alloc = Allocator.parse("iterative", "halfgreedy")
    replay_fail = profitable = winners = 0
    for inst in corpus:
        out = run_mechanism(inst, alloc, PaymentConfig("bisection", delta))
        for b in inst.bids:
            i = b.agent_id
            honest = b.value - out.payment(i) if i in out.assignment.selected else F(0)
            if i in out.assignment.selected:
                winners += 1
                p = out.payment(i)
                replay_fail += not wins_at(inst, alloc, i, p + delta)
                if p > 0:
                    replay_fail += wins_at(inst, alloc, i, max(F(0), p - delta))
            for v in _grid(b.value):
                lie = inst.with_bid(b.with_value(v))
                if i in alloc(lie).selected:
                    profitable += b.value - critical_value(lie, alloc, i) > honest
    online = generate_corpus(SEED, 100, "online", max_items=8, max_slots=8)
    oalloc = Allocator.parse("online", "maxvalue")
    mismatch = 0
    for inst in online:
        exact = run_mechanism(inst, oalloc, PaymentConfig("breakpoint"))
        approx = run_mechanism(inst, oalloc, PaymentConfig("bisection", delta))
        for i, p in exact.payments.items():
            mismatch += not (p <= approx.payment(i) < p + delta)
    ok = replay_fail == 0 and profitable == 0 and mismatch == 0
    acceptance_log(7, ok, f"{winners} winners replayed ({replay_fail} failures), "
                          f"{profitable} profitable misreports, {mismatch} breakpoint mismatches")
    assert ok


def test_criterion_8_determinism(acceptance_log, tmp_path, two_bin_instance):
    from greedymech import fileformat
    fileformat.save(two_bin_instance, tmp_path / "two_bin.json")
    online = generate_corpus(SEED, 1, "online")[0]
    fileformat.save(online, tmp_path / "online.json")
    commands = [
        ["solve", "two_bin.json", "--oracle", "fptas:1/4"],
        ["solve", "two_bin.json", "--allocator", "global", "--oracle", "exact"],
        ["pay", "two_bin.json"],
        ["verify", "--corpus", "7,40", "--property", "monotone"],
        ["verify", "--corpus", "7,40", "--property", "ratio", "--figure", "ratio.png"],
        ["verify", "two_bin.json", "--allocator", "single", "--oracle", "maxgreedy",
         "--property", "loser"],
        ["simulate", "online.json", "--trace", "trace.json", "--figure", "trace.png"],
        ["counterexample", "--eps", "1/8"],
    ]
    artefacts = ["ratio.png", "witness.json", "trace.json", "trace.png", "counterexample.json"]

    def snapshot():
        outs = [subprocess.run([sys.executable, "-m", "greedymech", *c], cwd=tmp_path,
                               capture_output=True).stdout for c in commands]
        files = {a: (tmp_path / a).read_bytes() for a in artefacts if (tmp_path / a).exists()}
        return outs, files

    first, second = snapshot(), snapshot()
    ok = first == second and len(first[1]) == len(artefacts)
    acceptance_log(8, ok, f"{len(commands)} commands rerun, stdout and {len(first[1])} "
                          f"output files byte-identical" if ok else "outputs differ between runs")
    assert ok
