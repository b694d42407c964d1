import random
from fractions import Fraction
from pathlib import Path

import pytest

from mmsc.model import GoodsGraph, Instance, UtilityFunction

FIXTURES = Path(__file__).parent / "fixtures"


def make_cycle(rows, types=None):
    g = GoodsGraph.cycle(len(rows[0]))
    agents = tuple(UtilityFunction(tuple(Fraction(v) for v in r))
                   for r in rows)
    return Instance(g, agents, tuple(types) if types is not None else None)


def random_cycle(rng: random.Random, n: int, m: int, types=None, max_value=6):
    """Random integer-valued cycle instance; typed agents share rows."""
    if types is not None:
        reps = [[rng.randrange(max_value + 1) for _ in range(m)]
                for _ in range(max(types) + 1)]
        rows = [reps[t] for t in types]
    else:
        rows = [[rng.randrange(max_value + 1) for _ in range(m)]
                for _ in range(n)]
    return make_cycle(rows, types)


@pytest.fixture
def fig1():
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 0),
             (1, 6), (2, 5)]
    g = GoodsGraph.general(8, edges)
    rows = [[3, 1, 1, 4, 3, 1, 1, 4],
            [2, 2, 0, 3, 1, 3, 1, 3],
            [1, 3, 2, 3, 0, 3, 2, 3]]
    return Instance(g, tuple(UtilityFunction(tuple(Fraction(v) for v in r))
                             for r in rows))


@pytest.fixture
def fig3():
    return make_cycle([[0, 3, 1, 3, 1, 3, 0, 2, 2],
                       [2, 2, 0, 3, 1, 3, 1, 3, 0],
                       [1, 3, 2, 3, 0, 3, 2, 3, 1]], types=[0, 1, 2])


def fig4_instance(n):
    row1 = []
    lo, hi = 1, n
    for _ in range(n):
        row1 += [hi, lo]
        hi -= 1
        lo += 1
    row2 = [n] + row1[:-1]
    rows = [row1] * (n - 2) + [row2] * 2
    return make_cycle(rows, types=[0] * (n - 2) + [1, 1])


@pytest.fixture
def fig5():
    r1 = [3, 3, 1, 2, 2, 1] * 2
    r2 = [3, 1, 2, 2, 1, 3] * 2
    return make_cycle([r1] * 3 + [r2] * 3, types=[0] * 3 + [1] * 3)


@pytest.fixture
def fig6():
    ra = [2, 0, 2, 1, 2, 1] * 3
    rb = [2, 1, 2, 1, 2, 0] * 3
    rc = [2, 1, 2, 0, 2, 1] * 3
    return make_cycle([ra] * 2 + [rb] * 2 + [rc] * 2,
                      types=[0, 0, 1, 1, 2, 2])
