"""Command-line front end.

Exit codes: 0 success/pass, 1 property failure, 2 input error,
3 disallowed configuration.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import fileformat
from .allocators import KINDS, Allocator
from .baselines import BoundExceeded, brute_opt_knapsack, brute_opt_multiknapsack, brute_opt_online
from .core import Instance, InstanceError, to_fraction
from .corpus import default_seed, generate_corpus
from .mechanism import DEFAULT_DELTA, DisallowedAllocator, PaymentConfig, run_mechanism, wins_at
from .online import simulate_online
from .packing import OracleKind
from .verify import (
    COUNTEREXAMPLE_AGENT,
    check_bitonic,
    check_loser_independent,
    check_monotone,
    check_stability,
    identical_bins_bound,
    max_greedy_counterexample,
    ratio_report,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_DISALLOWED = 0, 1, 2, 3


class UsageError(Exception):
    pass


def dec(x) -> str:
    return f"{float(x):.6f}"


def fr(x) -> str:
    return str(Fraction(x))


def _emit(lines, out):
    for line in lines:
        print(line, file=out)


def _allocator(args) -> Allocator:
    try:
        return Allocator(args.allocator, OracleKind.parse(args.oracle))
    except ValueError as e:
        raise UsageError(str(e)) from None


def _load(path) -> Instance:
    try:
        return fileformat.load(path)
    except OSError as e:
        raise UsageError(f"{path}: {e.strerror}") from None
    except InstanceError as e:
        raise UsageError(f"{path}: {e}") from None


def _check_kind(inst: Instance, alloc: Allocator):
    if alloc.kind == "online" and not inst.online:
        raise UsageError("online allocator needs an online instance")


def _assignment_lines(inst, a):
    lines = []
    for j, s in enumerate(a.per_bin):
        load = sum((inst.bids[i].size_in(j) for i in s), Fraction(0))
        lines.append(f"bin {j}: agents={sorted(s)} load={fr(load)} "
                     f"capacity={fr(inst.bins[j].capacity)} value={fr(inst.value_of(s))}")
    total = inst.value_of(a.selected)
    lines += [f"total_value: {fr(total)}", f"total_value_decimal: {dec(total)}"]
    return lines


# -- solve ------------------------------------------------------------------

def cmd_solve(args, out) -> int:
    inst = _load(args.file)
    alloc = _allocator(args)
    _check_kind(inst, alloc)
    a = alloc(inst)
    lines = ["command: solve", f"allocator: {alloc.kind}", f"oracle: {alloc.oracle}",
             f"items: {inst.n}", f"bins: {inst.m}"]
    lines += _assignment_lines(inst, a)
    lines.append(f"oracle_calls: {a.oracle_calls}")
    _emit(lines, out)
    return EXIT_OK


# -- pay --------------------------------------------------------------------

def cmd_pay(args, out) -> int:
    inst = _load(args.file)
    alloc = _allocator(args)
    _check_kind(inst, alloc)
    delta = _rational(args.delta, "--delta")
    if delta <= 0:
        raise UsageError("--delta must be positive")
    cfg = PaymentConfig(args.mode, delta)
    try:
        outcome = run_mechanism(inst, alloc, cfg)
    except DisallowedAllocator as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DISALLOWED
    lines = ["command: pay", f"allocator: {alloc.kind}", f"oracle: {alloc.oracle}",
             f"mode: {cfg.mode}", f"delta: {fr(delta)}"]
    a = outcome.assignment
    for i in range(inst.n):
        if i in a.selected:
            p = outcome.payment(i)
            up = wins_at(inst, alloc, i, p + delta)
            if p > 0:
                down = "yes" if not wins_at(inst, alloc, i, max(Fraction(0), p - delta)) else "no"
            else:
                down = "n/a"
            lines.append(
                f"winner {i}: bin={a.bin_of(i)} value={fr(inst.bids[i].value)} payment={fr(p)} "
                f"payment_decimal={dec(p)} win_at_p+delta={'yes' if up else 'no'} "
                f"lose_at_p-delta={down}")
        else:
            lines.append(f"loser {i}: value={fr(inst.bids[i].value)} payment=0")
    revenue = sum(outcome.payments.values(), Fraction(0))
    lines += [f"welfare: {fr(inst.value_of(a.selected))}", f"revenue: {fr(revenue)}"]
    _emit(lines, out)
    return EXIT_OK


# -- verify -----------------------------------------------------------------

def _corpus_kind(alloc: Allocator, identical: bool) -> tuple[str, dict]:
    if alloc.kind == "single":
        return "knapsack", {}
    if alloc.kind == "online":
        if alloc.oracle.tag == "max_value":
            return "online", {}
        return "online_multi", {"max_slots": 4}
    return ("identical" if identical else "multi"), {}


def _parse_corpus(text: str) -> tuple[int, int]:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return default_seed(), int(parts[0])
        if len(parts) == 2:
            return int(parts[0]), int(parts[1])
    except ValueError:
        pass
    raise UsageError(f"--corpus expects SEED,N or N, got {text!r}")


def _alpha(oracle: OracleKind) -> Fraction:
    if oracle.tag == "max_value":
        return Fraction(1)
    return oracle.approx_factor()


def _witness_doc(inst, prop, target, w) -> dict:
    doc = fileformat.instance_to_dict(inst)
    doc["perturbation"] = {
        "property": prop, "target": target, "agent": w.agent_id,
        "old": fileformat.bid_to_dict(w.old_bid), "new": fileformat.bid_to_dict(w.new_bid),
        "before": w.old_output.as_lists(), "after": w.new_output.as_lists(),
    }
    return doc


def _bitonic_grid(v: Fraction):
    unit = v if v > 0 else Fraction(1, 4)
    return [unit * k / 8 for k in range(0, 33)]


def cmd_verify(args, out) -> int:
    alloc = _allocator(args)
    if args.file:
        inst = _load(args.file)
        _check_kind(inst, alloc)
        corpus = [inst]
        source = f"file {args.file}"
    else:
        seed, count = _parse_corpus(args.corpus or "50")
        kind, kw = _corpus_kind(alloc, args.identical)
        corpus = generate_corpus(seed, count, kind, **kw)
        source = f"corpus seed={seed} n={count} kind={kind}"
    lines = ["command: verify", f"property: {args.property}", f"target: {alloc}",
             f"source: {source}", f"instances: {len(corpus)}"]

    if args.property == "ratio":
        return _verify_ratio(args, alloc, corpus, lines, out)

    trials, failure = 0, None
    for idx, inst in enumerate(corpus):
        if args.property == "monotone":
            reps = [check_monotone(alloc, inst)]
        elif args.property == "loser":
            reps = [check_loser_independent(alloc, inst)]
        elif args.property == "stable":
            reps = [check_stability(alloc, inst)]
        else:
            reps = [check_bitonic(alloc, inst, i, _bitonic_grid(inst.bids[i].value))
                    for i in range(inst.n)]
        for rep in reps:
            trials += rep.trials
            if not rep.passed and failure is None:
                failure = (idx, inst, rep)
        if failure:
            break
    verdict = "FAIL" if failure else "PASS"
    lines += [f"trials: {trials}", f"verdict: {verdict}"]
    if failure:
        idx, inst, rep = failure
        w = rep.witness
        path = Path(args.witness)
        path.write_text(json.dumps(_witness_doc(inst, args.property, str(alloc), w), indent=2) + "\n")
        lines += [f"witness_instance: {idx}", f"witness_agent: {w.agent_id}",
                  f"witness_old: value={fr(w.old_bid.value)} size={fr(w.old_bid.size)}",
                  f"witness_new: value={fr(w.new_bid.value)} size={fr(w.new_bid.size)}",
                  f"witness_before: {w.old_output.as_lists()}",
                  f"witness_after: {w.new_output.as_lists()}",
                  f"witness_file: {path}"]
    else:
        lines.append("witness: none")
    lines.append(f"summary: {args.property} {verdict} on {alloc} over "
                 f"{len(corpus)} instance(s), {trials} trials")
    _emit(lines, out)
    return EXIT_FAIL if failure else EXIT_OK


def _verify_ratio(args, alloc, corpus, lines, out) -> int:
    alpha = _alpha(alloc.oracle)
    if alloc.kind == "single":
        opt = lambda inst: brute_opt_knapsack(inst.bids, inst.bins[0].capacity)[0]  # noqa: E731
        bound = alpha
    elif alloc.kind == "online":
        opt = brute_opt_online
        bound = alpha + 1
    else:
        opt = lambda inst: brute_opt_multiknapsack(inst)[0]  # noqa: E731
        bound = alpha + 1
    if args.identical and alloc.kind == "iterative":
        bound = identical_bins_bound(alpha)
    try:
        rep = ratio_report(corpus, alloc, opt, bound)
    except BoundExceeded as e:
        raise UsageError(str(e)) from None
    verdict = "PASS" if rep.passed else "FAIL"
    worst = rep.worst if rep.worst is not None else Fraction(1)
    lines += [f"bound: {fr(rep.bound)}", f"bound_decimal: {dec(rep.bound)}",
              f"worst_ratio: {fr(worst)}", f"worst_ratio_decimal: {dec(worst)}",
              f"violations: {len(rep.violations)}", f"undecided: {rep.undecided}",
              f"verdict: {verdict}"]
    if rep.violations:
        idx, ratio, inst = rep.violations[0]
        path = Path(args.witness)
        fileformat.save(inst, path)
        lines += [f"witness_instance: {idx}", f"witness_file: {path}"]
    if args.figure:
        from .plotting import ratio_figure
        ratio_figure(rep.ratios, rep.bound, args.figure, title=str(alloc))
        lines.append(f"figure: {args.figure}")
    lines.append(f"summary: ratio {verdict} on {alloc}, worst {dec(worst)} "
                 f"vs bound {dec(rep.bound)} over {len(corpus)} instance(s)")
    _emit(lines, out)
    return EXIT_OK if rep.passed else EXIT_FAIL


# -- simulate ---------------------------------------------------------------

def cmd_simulate(args, out) -> int:
    inst = _load(args.file)
    if not inst.online:
        raise UsageError("simulate needs an online instance (\"online\": true)")
    try:
        oracle = OracleKind.parse(args.oracle)
    except ValueError as e:
        raise UsageError(str(e)) from None
    a, trace = simulate_online(inst, oracle)
    alg = inst.value_of(a.selected)
    lines = ["command: simulate", f"oracle: {oracle}", f"slots: {inst.m}", f"items: {inst.n}"]
    for ev in trace:
        lines.append(f"slot {ev.slot}: present={sorted(ev.present)} chosen={sorted(ev.chosen)}")
    lines += [f"alg_value: {fr(alg)}", f"alg_value_decimal: {dec(alg)}"]
    try:
        opt = brute_opt_online(inst)
    except BoundExceeded:
        lines.append("opt_value: skipped (instance beyond enumeration bounds)")
    else:
        lines += [f"opt_value: {fr(opt)}", f"opt_value_decimal: {dec(opt)}"]
        if opt == 0:
            ratio = Fraction(1)
        elif alg == 0:
            ratio = None
        else:
            ratio = opt / alg
        if ratio is None:
            lines.append("ratio: inf")
        else:
            lines += [f"ratio: {fr(ratio)}", f"ratio_decimal: {dec(ratio)}"]
    if args.trace:
        events = [{"slot": ev.slot, "present": sorted(ev.present), "chosen": sorted(ev.chosen)}
                  for ev in trace]
        Path(args.trace).write_text(json.dumps(events, indent=2) + "\n")
        lines.append(f"trace_file: {args.trace}")
    if args.figure:
        from .plotting import trace_figure
        trace_figure(inst, trace, args.figure, title=f"online {oracle}")
        lines.append(f"figure: {args.figure}")
    _emit(lines, out)
    return EXIT_OK


# -- counterexample ---------------------------------------------------------

def _item_label(inst, i):
    b = inst.bids[i]
    return f"({fr(b.size)}, {fr(b.value)})"


def cmd_counterexample(args, out) -> int:
    eps = _rational(args.eps, "--eps")
    try:
        inst, rep = max_greedy_counterexample(eps)
    except ValueError as e:
        raise UsageError(str(e)) from None
    fileformat.save(inst, args.out)
    w = rep.witness
    lines = ["command: counterexample", f"eps: {fr(eps)}", "target: iterative+maxgreedy",
             f"instance_file: {args.out}", f"agent: {COUNTEREXAMPLE_AGENT}"]
    if w is not None:
        raised = inst.with_bid(w.new_bid)
        lines.append(f"raise: value {fr(w.old_bid.value)} -> {fr(w.new_bid.value)}")
        for tag, a, src in (("before", w.old_output, inst), ("after", w.new_output, raised)):
            for j, s in enumerate(a.per_bin):
                items = " ".join(_item_label(src, i) for i in sorted(s))
                lines.append(f"{tag} bin {j}: agents={sorted(s)} items={items}")
    lines += [f"trials: {rep.trials}", f"verdict: {rep.verdict}",
              f"summary: monotone {rep.verdict} for iterated MaxGreedy at eps={fr(eps)}"]
    _emit(lines, out)
    return EXIT_FAIL if not rep.passed else EXIT_OK


# -- wiring -----------------------------------------------------------------

def _rational(text: str, flag: str) -> Fraction:
    try:
        return to_fraction(text)
    except (TypeError, ValueError, ZeroDivisionError):
        raise UsageError(f"{flag}: not a rational: {text!r}") from None


def _target_flags(p, default_alloc="iterative"):
    p.add_argument("--allocator", choices=KINDS, default=default_alloc)
    p.add_argument("--oracle", default="halfgreedy",
                   help="maxgreedy | halfgreedy | maxvalue | exact | fptas:EPS")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="greedymech", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run an allocator on an instance file")
    p.add_argument("file")
    _target_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("pay", help="allocation plus critical-value payments")
    p.add_argument("file")
    _target_flags(p)
    p.add_argument("--delta", default=fr(DEFAULT_DELTA))
    p.add_argument("--mode", choices=("bisection", "breakpoint"), default="bisection")
    p.set_defaults(func=cmd_pay)

    p = sub.add_parser("verify", help="check a property on a file or a seeded corpus")
    src = p.add_mutually_exclusive_group()
    src.add_argument("file", nargs="?")
    src.add_argument("--corpus", metavar="SEED,N")
    p.add_argument("--property", required=True,
                   choices=("monotone", "loser", "bitonic", "stable", "ratio"))
    _target_flags(p)
    p.add_argument("--identical", action="store_true",
                   help="corpus of equal-capacity bins; ratio uses the identical-bins bound")
    p.add_argument("--witness", default="witness.json")
    p.add_argument("--figure", help="ratio only: write a histogram image here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="run the online allocator slot by slot")
    p.add_argument("file")
    p.add_argument("--oracle", default="maxvalue")
    p.add_argument("--trace")
    p.add_argument("--figure")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("counterexample", help="write and check the MaxGreedy counterexample")
    p.add_argument("--eps", default="1/10")
    p.add_argument("--out", default="counterexample.json")
    p.set_defaults(func=cmd_counterexample)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.func(args, out)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
