"""Single-bin knapsack oracles.

Every oracle takes the bids still competing for one bin plus the bin's
capacity and returns the agents packed into it. Sizes are read from
``Bid.size``; multi-bin callers project per-bin sizes before calling.
Ties are always broken by the lower agent id.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import Bid, to_fraction, Number

ZERO = Fraction(0)


@dataclass(frozen=True)
class OracleResult:
    selected: frozenset
    reported_value: Fraction


EMPTY = OracleResult(frozenset(), ZERO)


@dataclass(frozen=True)
class FptasConfig:
    epsilon: Fraction

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")


def _density(b: Bid) -> Fraction:
    return b.value / b.size


def _total(bids: Sequence[Bid], ids) -> Fraction:
    by_id = {b.agent_id: b for b in bids}
    return sum((by_id[i].value for i in ids), ZERO)


def _greedy_fill(order: Sequence[Bid], capacity: Fraction) -> list[Bid]:
    chosen, load = [], ZERO
    for b in order:
        if load + b.size <= capacity:
            chosen.append(b)
            load += b.size
    return chosen


def max_greedy(bids: Sequence[Bid], capacity: Fraction) -> OracleResult:
    """Better of a value-greedy and a density-greedy packing (value-greedy
    wins exact ties)."""
    by_value = sorted(bids, key=lambda b: (-b.value, b.agent_id))
    by_density = sorted(bids, key=lambda b: (-_density(b), b.agent_id))
    s1 = _greedy_fill(by_value, capacity)
    s2 = _greedy_fill(by_density, capacity)
    v1 = sum((b.value for b in s1), ZERO)
    v2 = sum((b.value for b in s2), ZERO)
    if v1 >= v2:
        return OracleResult(frozenset(b.agent_id for b in s1), v1)
    return OracleResult(frozenset(b.agent_id for b in s2), v2)


def half_greedy(bids: Sequence[Bid], capacity: Fraction) -> OracleResult:
    """Loser-independent 2-approximation.

    Compares the single most valuable item against a density-greedy run over
    small items (size at most half the bin) that stops once half the bin is
    covered. The greedy run is scored by the value of exactly the first half
    of the bin, counting the last item fractionally.
    """
    fitting = [b for b in bids if b.size <= capacity]
    if not fitting:
        return EMPTY
    top = min(fitting, key=lambda b: (-b.value, b.agent_id))
    v1 = top.value

    half = capacity / 2
    small = sorted((b for b in fitting if b.size <= half),
                   key=lambda b: (-_density(b), b.agent_id))
    s2: list[Bid] = []
    load = ZERO
    for b in small:
        if load >= half:
            break
        s2.append(b)
        load += b.size
    v2 = ZERO
    if s2:
        head = s2[:-1]
        last = s2[-1]
        head_load = sum((b.size for b in head), ZERO)
        v2 = sum((b.value for b in head), ZERO) \
            + _density(last) * min(last.size, half - head_load)

    if v1 >= v2:
        return OracleResult(frozenset({top.agent_id}), v1)
    return OracleResult(frozenset(b.agent_id for b in s2), v2)


def max_value_oracle(bids: Sequence[Bid], capacity: Fraction) -> OracleResult:
    """The most valuable bid that fits the bin, alone."""
    fitting = [b for b in bids if b.size <= capacity]
    if not fitting:
        return EMPTY
    top = min(fitting, key=lambda b: (-b.value, b.agent_id))
    return OracleResult(frozenset({top.agent_id}), top.value)


# -- pseudo-polynomial exact knapsack ---------------------------------------

def _integer_sizes(sizes: Sequence[Fraction], capacity: Fraction):
    den = math.lcm(capacity.denominator, *(s.denominator for s in sizes))
    cap = int(capacity * den)
    return [int(s * den) for s in sizes], cap


def pseudo_pack(scaled_values: Sequence[int], sizes: Sequence[Fraction],
                capacity: Fraction) -> frozenset:
    """Exact 0/1 knapsack over small integer values.

    Returns positions (0-based) of an optimal subset. Among all feasible
    subsets the winner is the one with maximum total value, then minimum
    total size, then the one that leaves out the highest positions. That is a
    fixed total order on subsets, so the output is a deterministic function
    of the input and an item that does not enter the optimum cannot disturb
    it.
    """
    if not scaled_values:
        return frozenset()
    if any(v < 0 for v in scaled_values):
        raise ValueError("scaled values must be nonnegative")
    capacity = to_fraction(capacity)
    w, cap = _integer_sizes([to_fraction(s) for s in sizes], capacity)
    return _dp_pack(list(scaled_values), w, cap)


def _dp_pack(values: list[int], w: list[int], cap: int) -> frozenset:
    # rows[i][t] = least size reaching value exactly t with the first i items
    n = len(values)
    total = sum(values)
    inf = cap + 1
    # clamp everything infeasible to inf; sizes along any feasible path stay exact
    use_int64 = cap + max(w) < 2 ** 62
    dtype = np.int64 if use_int64 else object
    rows = np.full((n + 1, total + 1), inf, dtype=dtype)
    rows[0, 0] = 0
    for i in range(n):
        prev = rows[i]
        cur = prev.copy()
        v, wi = values[i], w[i]
        if wi <= cap:
            cand = prev[: total + 1 - v] + wi
            if use_int64:
                np.minimum(cand, inf, out=cand)
                np.minimum(cur[v:], cand, out=cur[v:])
            else:
                cur[v:] = [min(a, b, inf) for a, b in zip(cur[v:], cand)]
        rows[i + 1] = cur

    feasible = np.nonzero(rows[n] <= cap)[0]
    val = int(feasible[-1])
    chosen = []
    for i in range(n, 0, -1):
        if rows[i - 1, val] == rows[i, val]:
            continue
        chosen.append(i - 1)
        val -= values[i - 1]
    assert val == 0
    return frozenset(chosen)


def exact_oracle(bids: Sequence[Bid], capacity: Fraction, max_items: int = 24) -> OracleResult:
    """Optimal single-bin packing by branch and bound.

    Uses the same total order on subsets as :func:`pseudo_pack` (value, then
    smaller size, then leaving out higher agent ids) so it is monotone and
    loser-independent. Exponential; meant for small instances.
    """
    fitting = sorted((b for b in bids if b.size <= capacity), key=lambda b: b.agent_id)
    if len(fitting) > max_items:
        raise ValueError(f"exact oracle limited to {max_items} fitting items")
    suffix = [ZERO] * (len(fitting) + 1)
    for i in range(len(fitting) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + fitting[i].value
    best = (ZERO, ZERO, ())
    best_key = (ZERO, ZERO, ())

    def better(val, load, ids):
        key = (-val, load, tuple(sorted(ids, reverse=True)))
        return key < best_key, key

    chosen: list[int] = []

    def dfs(i, load, val):
        nonlocal best, best_key
        if val + suffix[i] < best[0]:
            return
        if i == len(fitting):
            ok, key = better(val, load, chosen)
            if ok:
                best, best_key = (val, load, tuple(chosen)), key
            return
        b = fitting[i]
        if load + b.size <= capacity:
            chosen.append(b.agent_id)
            dfs(i + 1, load + b.size, val + b.value)
            chosen.pop()
        dfs(i + 1, load, val)

    dfs(0, ZERO, ZERO)
    return OracleResult(frozenset(best[2]), best[0])


# -- monotone FPTAS ---------------------------------------------------------

def floor_log2(x: Fraction) -> int:
    """Largest integer k with 2**k <= x, for rational x > 0."""
    if x <= 0:
        raise ValueError("log of a nonpositive number")
    x = Fraction(x)
    k = x.numerator.bit_length() - x.denominator.bit_length()
    while Fraction(2) ** k > x:
        k -= 1
    while Fraction(2) ** (k + 1) <= x:
        k += 1
    return k


def ceil_log2(x: Fraction) -> int:
    k = floor_log2(x)
    return k if Fraction(2) ** k == x else k + 1


def _scaled_ints(values: Sequence[Fraction], k: int, eps: Fraction, n: int) -> list[int]:
    # floor(n * min(v, 2^k) / (eps * 2^k)) in pure integer arithmetic
    en, ed = eps.numerator, eps.denominator
    out = []
    if k >= 0:
        cap = 1 << k
        for v in values:
            vn, vd = (cap, 1) if v >= cap else (v.numerator, v.denominator)
            out.append((n * vn * ed) // (vd * en * cap))
    else:
        shift = 1 << -k
        for v in values:
            if v * shift >= 1:
                out.append((n * ed) // en)
            else:
                out.append((n * v.numerator * ed * shift) // (v.denominator * en))
    return out


def scale_k(bids: Sequence[Bid], k: int, eps: Fraction, n: int | None = None):
    """Truncate values at 2**k, scale by n/(eps*2**k) and floor.

    Returns ``(scaled, descaled)``. ``n`` defaults to ``len(bids)``.
    """
    n = len(bids) if n is None else n
    alpha = Fraction(n) / (eps * Fraction(2) ** k)
    scaled = _scaled_ints([b.value for b in bids], k, Fraction(eps), n)
    descaled = [Fraction(v) / alpha for v in scaled]
    return scaled, descaled


def fptas_k_range(n: int, vmax: Fraction, eps: Fraction) -> range:
    """Scaling exponents visited, in visiting (descending) order."""
    hi = ceil_log2(n * vmax / eps)
    lo = floor_log2(vmax * (1 - eps) / n) - 1
    return range(hi, lo - 1, -1)


def monotone_fptas(bids: Sequence[Bid], capacity: Fraction,
                   cfg: FptasConfig) -> OracleResult:
    """(1-eps)-approximate knapsack that stays monotone and loser-independent.

    ``n`` in the scale factor counts every bid offered, fitting or not, so a
    loser's size cannot shift the scaling grid. The largest value is taken
    over bids that fit the bin.
    """
    eps = cfg.epsilon
    fitting = [b for b in bids if b.size <= capacity]
    vmax = max((b.value for b in fitting), default=ZERO)
    if vmax <= 0:
        return EMPTY
    n = len(bids)
    values = [b.value for b in fitting]
    w, cap = _integer_sizes([b.size for b in fitting], capacity)
    best_value, best = ZERO, frozenset()
    for k in fptas_k_range(n, vmax, eps):
        scaled = _scaled_ints(values, k, eps, n)
        pos = _dp_pack(scaled, w, cap)
        # de-scaled value of the packing: sum(v') / alpha
        val = Fraction(sum(scaled[p] for p in pos)) * eps * Fraction(2) ** k / n
        if val > best_value:
            best_value = val
            best = frozenset(fitting[p].agent_id for p in pos)
    return OracleResult(best, best_value)
