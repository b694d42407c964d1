import random
from fractions import Fraction

import pytest

from conftest import make_cycle, random_cycle
from mmsc.model import (
    Allocation,
    Arc,
    GoodsGraph,
    Instance,
    PreconditionError,
    UnsupportedShapeError,
    UtilityFunction,
)
from mmsc.mms_core import mms_cycle
from mmsc.regularize import TRIVIAL, pull_back, regular_mms_values, regularize


def test_trivial_when_all_mms_zero():
    inst = make_cycle([[0, 0, 0, 5], [7, 0, 0, 0]])
    assert mms_cycle(inst.agents[0], 2).value == 0
    assert regularize(inst) is TRIVIAL


def test_fig3_regularization(fig3):
    reg_inst, cert = regularize(fig3)
    for u in reg_inst.agents:
        assert u.total == 3
        assert mms_cycle(u, 3).value == 1
    assert regular_mms_values(cert) == [1, 1, 1]
    assert [ch.original_mms for ch in cert.chains] == [5, 5, 6]
    assert all(ch.substituted_from is None for ch in cert.chains)


def test_zero_mms_agent_substituted():
    inst = make_cycle([[2, 2, 2, 2], [0, 0, 9, 0]])
    reg_inst, cert = regularize(inst)
    assert cert.chains[1].substituted_from == 0
    assert reg_inst.agents[1].values == reg_inst.agents[0].values


def test_random_regular_outputs():
    rng = random.Random(31)
    checked = 0
    while checked < 30:
        n = rng.randrange(2, 5)
        m = rng.randrange(n, 11)
        inst = random_cycle(rng, n, m)
        reg = regularize(inst)
        if reg is TRIVIAL:
            continue
        reg_inst, _ = reg
        for u in reg_inst.agents:
            assert u.total == n
            assert mms_cycle(u, n).value == 1
        checked += 1


def test_pull_back_requires_c_sufficiency(fig3):
    reg_inst, cert = regularize(fig3)
    bad = Allocation((Arc(0, 1), Arc(1, 1), Arc(2, 7)))
    with pytest.raises(PreconditionError):
        pull_back(bad, cert, Fraction(5, 6))


def test_pull_back_reports_original_ratios(fig3):
    reg_inst, cert = regularize(fig3)
    alloc = Allocation((Arc(1, 3), Arc(7, 3), Arc(4, 3)))
    rep = pull_back(alloc, cert, Fraction(5, 6))
    assert rep.certified_c == Fraction(5, 6)
    assert rep.agents[0].mms == 5
    assert rep.min_ratio >= Fraction(5, 6)


def test_rejects_unsupported_shapes():
    g = GoodsGraph.path(3)
    u = UtilityFunction(tuple(Fraction(v) for v in (1, 1, 1)))
    with pytest.raises(UnsupportedShapeError):
        regularize(Instance(g, (u,)))
