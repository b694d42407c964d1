import random
from fractions import Fraction


from mmsc.model import GoodsGraph, UtilityFunction, validate_split
from mmsc.mms_core import (
    mms_cycle,
    mms_for_graph,
    mms_path,
    mms_tree,
    mms_unicyclic,
    rescale_to_integers,
)
from mmsc.oracle import oracle_mms


def _u(values):
    return UtilityFunction(tuple(Fraction(v) for v in values))


def test_fig3_cycle_values(fig3):
    values = [mms_cycle(u, 3).value for u in fig3.agents]
    assert values == [5, 5, 6]


def test_split_certifies_value(fig3):
    for u in fig3.agents:
        res = mms_cycle(u, 3)
        assert validate_split(fig3.graph, res.split)
        assert all(sum(u[g] for g in b.goods(9)) >= res.value
                   for b in res.split.bundles if not b.empty)


def test_path_simple_cases():
    assert mms_path(_u([1, 1, 1, 1]), 2).value == 2
    assert mms_path(_u([3, 1, 1, 3]), 2).value == 4
    assert mms_path(_u([5]), 3).value == 0  # forced empty bundles
    assert mms_path(_u([2, 2]), 1).value == 4


def test_rational_utilities_are_exact():
    u = _u([Fraction(1, 3), Fraction(1, 6), Fraction(1, 2)])
    r = rescale_to_integers(u)
    assert r.scale == 6 and r.scaled == (2, 1, 3)
    assert mms_cycle(u, 3).value == Fraction(1, 6)


def test_cycle_beats_path():
    rng = random.Random(5)
    for _ in range(40):
        m = rng.randrange(3, 10)
        n = rng.randrange(1, 5)
        u = _u([rng.randrange(0, 7) for _ in range(m)])
        assert mms_cycle(u, n).value >= mms_path(u, n).value


def test_tree_and_unicyclic_match_oracle():
    rng = random.Random(13)
    for _ in range(25):
        m = rng.randrange(3, 8)
        n = rng.randrange(1, 4)
        edges = [(i, rng.randrange(0, i)) for i in range(1, m)]
        tree = GoodsGraph.tree(m, edges)
        u = _u([rng.randrange(0, 6) for _ in range(m)])
        assert mms_tree(tree, u, n).value == oracle_mms(tree, u, n)
        extra = None
        for a in range(m):
            for b in range(a + 1, m):
                if (a, b) not in tree.edges and (b, a) not in tree.edges:
                    extra = (a, b)
                    break
            if extra:
                break
        if extra is None:
            continue
        uni = GoodsGraph.unicyclic(m, list(tree.edges) + [extra])
        assert mms_unicyclic(uni, u, n).value == oracle_mms(uni, u, n)


def test_cycle_matches_oracle():
    rng = random.Random(21)
    for _ in range(40):
        m = rng.randrange(3, 10)
        n = rng.randrange(1, 5)
        u = _u([rng.randrange(0, 7) for _ in range(m)])
        g = GoodsGraph.cycle(m)
        assert mms_cycle(u, n).value == oracle_mms(g, u, n)


def test_mms_for_graph_dispatch(fig3):
    g_path = GoodsGraph.path(4)
    u = _u([1, 2, 3, 4])
    assert mms_for_graph(g_path, u, 2).value == mms_path(u, 2).value
    assert mms_for_graph(fig3.graph, fig3.agents[0], 3).value == 5
