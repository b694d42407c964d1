import math
import random
from fractions import Fraction

import pytest

from conftest import make_cycle, random_cycle
from mmsc.model import (
    GoodsGraph,
    OverBudgetError,
    UtilityFunction,
    validate_split,
)
from mmsc.oracle import (
    OracleBudget,
    enumerate_connected_splits,
    enumerate_cycle_splits,
    oracle_exists_mms_allocation,
    oracle_max_c,
    oracle_mms,
)


def test_cycle_split_enumeration_counts():
    # n-splits of an m-cycle with empty bundles allowed: the count grows with
    # the number of cut choices; each emitted split must be valid.
    g = GoodsGraph.cycle(5)
    splits = list(enumerate_cycle_splits(5, 2, OracleBudget()))
    assert all(validate_split(g, s) for s in splits)
    assert len({tuple(sorted((b.start, b.length) for b in s.bundles))
                for s in splits}) == len(splits)


def test_connected_split_enumeration_on_tree():
    g = GoodsGraph.tree(4, [(0, 1), (1, 2), (1, 3)])
    splits = list(enumerate_connected_splits(g, 2, OracleBudget()))
    assert splits
    assert all(validate_split(g, s) for s in splits)


def test_budget_enforced():
    g = GoodsGraph.cycle(20)
    u = UtilityFunction(tuple(Fraction(1) for _ in range(20)))
    with pytest.raises(OverBudgetError):
        oracle_mms(g, u, 3, OracleBudget())


def test_fig1_oracle_values(fig1):
    values = [oracle_mms(fig1.graph, u, 3) for u in fig1.agents]
    assert values == [5, 5, 5]
    assert oracle_exists_mms_allocation(fig1) is not None


def test_fig3_oracle(fig3):
    assert oracle_exists_mms_allocation(fig3) is None
    assert oracle_max_c(fig3) == Fraction(5, 6)


def test_max_c_unbounded_when_all_mms_zero():
    inst = make_cycle([[0, 0, 5, 0], [6, 0, 0, 0]])
    assert oracle_max_c(inst) == math.inf


def test_max_c_at_least_one_iff_allocation_exists():
    rng = random.Random(107)
    for _ in range(25):
        n = rng.randrange(2, 5)
        m = rng.randrange(3, 9)
        inst = random_cycle(rng, n, m)
        c = oracle_max_c(inst)
        exists = oracle_exists_mms_allocation(inst) is not None
        assert exists == (c >= 1)
