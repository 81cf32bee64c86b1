from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import strategies as st

from greedymech.core import Bid, make_bid, make_instance


def subsets(items):
    for r in range(len(items) + 1):
        yield from combinations(items, r)


def enum_knapsack(values, sizes, capacity):
    """Plain enumeration over every subset (independent of the library)."""
    best, best_set = F(0), ()
    for s in subsets(range(len(values))):
        if sum((sizes[i] for i in s), F(0)) <= capacity:
            v = sum((values[i] for i in s), F(0))
            if v > best:
                best, best_set = v, s
    return best, frozenset(best_set)


@pytest.fixture
def two_bin_instance():
    """Two unit bins, six items, eps = 1/10."""
    eps = F(1, 10)
    items = [(1 + eps, F(1, 2)), (1 + eps, F(1, 2)), (F(3, 2), F(3, 4)),
             (F(1, 2), F(1, 4)), (2 - eps, 1), (2 - eps, 1)]
    return make_instance(items, [1, 1])


@pytest.fixture
def three_items():
    return [make_bid(0, 6, 1), make_bid(1, 10, 2), make_bid(2, 12, 3)]


rationals = st.builds(F, st.integers(1, 40), st.integers(1, 8))
nonneg_rationals = st.builds(F, st.integers(0, 40), st.integers(1, 8))


@st.composite
def bid_lists(draw, max_items=8):
    n = draw(st.integers(0, max_items))
    return [Bid(i, draw(nonneg_rationals), draw(rationals)) for i in range(n)]


ACCEPTANCE_LINES: list = []


@pytest.fixture
def acceptance_log():
    def log(number, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed
    return log


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
