import pytest
from fractions import Fraction

from mmsc.model import (
    Allocation,
    AnchoredSplit,
    Arc,
    EMPTY_ARC,
    GoodsGraph,
    Instance,
    InternalInvariantError,
    MmscError,
    Shape,
    Split,
    UtilityFunction,
    build_report,
    bundle_value,
    is_connected_bundle,
    reverse_arc,
    reverse_orientation,
    validate_split,
)


def test_arc_goods_and_end():
    a = Arc(7, 4)
    assert a.goods(9) == (7, 8, 0, 1)
    assert a.end(9) == 1
    assert EMPTY_ARC.empty
    with pytest.raises(MmscError):
        EMPTY_ARC.end(9)


def test_reverse_arc_is_an_involution_on_goods():
    m = 7
    for start in range(m):
        for length in range(m + 1):
            a = Arc(start, length)
            r = reverse_arc(a, m)
            assert sorted(m - 1 - g for g in a.goods(m)) == sorted(r.goods(m))
            assert reverse_arc(r, m).goods(m) == a.goods(m)


def test_goods_graph_shapes():
    assert GoodsGraph.cycle(5).shape is Shape.CYCLE
    assert GoodsGraph.path(4).shape is Shape.PATH
    with pytest.raises(MmscError):
        GoodsGraph.tree(4, [(0, 1), (1, 2)])  # disconnected
    with pytest.raises(MmscError):
        GoodsGraph.cycle(0)


def test_anchored_split_prefix_offsets_strictly_increase():
    m = 10
    arcs = (Arc(3, 4), Arc(7, 2), Arc(9, 4))
    s = AnchoredSplit(m, 4, arcs)
    offs = [s.prefix_end_offset(i) for i in range(3)]
    assert offs == [2, 4, 8] == sorted(offs)
    # With the anchor at the first arc's start the last prefix is everything.
    t = AnchoredSplit(m, 3, arcs)
    assert t.prefix_end_offset(2) == m - 1
    assert t.prefix_set(2) == frozenset(range(m))


def test_anchored_split_rejects_bad_layout():
    with pytest.raises(MmscError):
        AnchoredSplit(6, 0, (Arc(0, 3), Arc(4, 3)))  # gap
    with pytest.raises(MmscError):
        AnchoredSplit(6, 5, (Arc(0, 3), Arc(3, 3)))  # anchor outside arcs[0]


def test_validate_split_and_connectivity():
    g = GoodsGraph.cycle(6)
    ok = Split((Arc(0, 2), Arc(2, 3), Arc(5, 1)))
    assert validate_split(g, ok)
    overlapping = Split((Arc(0, 3), Arc(2, 4)))
    assert not validate_split(g, overlapping)
    tree = GoodsGraph.tree(4, [(0, 1), (0, 2), (0, 3)])
    assert is_connected_bundle(tree, frozenset({1, 0, 3}))
    assert not is_connected_bundle(tree, frozenset({1, 3}))


def test_instance_type_validation():
    g = GoodsGraph.cycle(3)
    u = UtilityFunction((Fraction(1), Fraction(1), Fraction(1)))
    v = UtilityFunction((Fraction(2), Fraction(0), Fraction(1)))
    with pytest.raises(MmscError):
        Instance(g, (u, v), (0, 0))  # same type, different utilities
    inst = Instance(g, (u, v, u), (0, 1, 0))
    assert inst.type_groups() == [[0, 2], [1]]


def test_build_report_rejects_overclaimed_c():
    g = GoodsGraph.cycle(4)
    u = UtilityFunction(tuple(Fraction(1) for _ in range(4)))
    inst = Instance(g, (u, u))
    alloc = Allocation((Arc(0, 1), Arc(1, 3)))
    rep = build_report(inst, alloc, [Fraction(2), Fraction(2)],
                       Fraction(1, 2))
    assert rep.min_ratio == Fraction(1, 2)
    with pytest.raises(InternalInvariantError):
        build_report(inst, alloc, [Fraction(2), Fraction(2)], Fraction(1))


def test_reverse_orientation_preserves_values():
    g = GoodsGraph.cycle(5)
    u = UtilityFunction(tuple(Fraction(v) for v in (1, 2, 3, 4, 5)))
    inst = Instance(g, (u,))
    rev = reverse_orientation(inst)
    arc = Arc(1, 3)
    assert bundle_value(u, arc) == bundle_value(rev.agents[0],
                                                reverse_arc(arc, 5))
