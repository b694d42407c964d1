"""Arc algebra on cycles shared by the exact and approximate constructors.

Also hosts the two small three-agent lemma constructions (a contained bundle
used as the c-worthy intersection; two bundles of one split acceptable to
another agent) that both `exact_alloc.allocate_three_agents_small` and
`csuff.five_sixths_three_agents` rely on.  All agents here are assumed
regular (mms = 1, total = n) unless stated otherwise.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .model import (
    Arc,
    EMPTY_ARC,
    InternalInvariantError,
    Rational,
    Split,
    UtilityFunction,
    bundle_value,
)


def arc_goods_set(arc: Arc, m: int) -> frozenset:
    return frozenset(arc.goods(m))


def arc_intersection(a: Arc, b: Arc, m: int) -> list[Arc]:
    """Connected pieces of a ∩ b (0, 1, or 2 arcs, in clockwise order)."""
    if a.empty or b.empty:
        return []
    goods = set(a.goods(m)) & set(b.goods(m))
    return arcs_from_goods(goods, m)


def arcs_from_goods(goods, m: int) -> list[Arc]:
    """Decompose a set of goods into maximal arcs, clockwise by start."""
    goods = set(goods)
    if not goods:
        return []
    if len(goods) == m:
        return [Arc(0, m)]
    starts = sorted(x for x in goods if (x - 1) % m not in goods)
    arcs = []
    for s in starts:
        length = 0
        while (s + length) % m in goods:
            length += 1
        arcs.append(Arc(s, length))
    return arcs


def single_arc(goods, m: int) -> Arc:
    arcs = arcs_from_goods(goods, m)
    if not arcs:
        return EMPTY_ARC
    if len(arcs) != 1:
        raise InternalInvariantError(f"expected one arc, got {arcs}")
    return arcs[0]


def cut_edges(split: Split, m: int) -> list[int]:
    """Cut edges of an all-nonempty arc split (edge e joins goods e, e+1)."""
    return sorted(arc.end(m) for arc in split.bundles if not arc.empty)


def arc_containing(split: Split, good: int, m: int) -> int:
    """Index of the split bundle containing the given good."""
    for i, arc in enumerate(split.bundles):
        if not arc.empty and (good - arc.start) % m < arc.length:
            return i
    raise InternalInvariantError(f"good {good} not covered by split")


def complete_arc_allocation(m: int, assigned: Sequence[tuple[int, Arc]],
                            n: int) -> list[Arc]:
    """Extend disjoint assigned arcs to a full allocation of the cycle.

    Each uncovered gap is attached to the assigned arc clockwise-preceding
    it.  `assigned` maps every agent 0..n-1 to a (possibly empty) arc; at
    least one arc must be non-empty.
    """
    bundles: list[Arc] = [EMPTY_ARC] * n
    nonempty = [(agent, arc) for agent, arc in assigned if not arc.empty]
    if not nonempty:
        raise InternalInvariantError("nothing assigned")
    covered = set()
    for _, arc in nonempty:
        goods = arc.goods(m)
        if covered & set(goods):
            raise InternalInvariantError("assigned arcs overlap")
        covered.update(goods)
    order = sorted(nonempty, key=lambda t: t[1].start)
    for idx, (agent, arc) in enumerate(order):
        nxt = order[(idx + 1) % len(order)][1]
        length = (nxt.start - arc.start) % m
        if len(order) == 1:
            length = m
        bundles[agent] = Arc(arc.start, length)
    for agent, arc in assigned:
        if arc.empty:
            bundles[agent] = EMPTY_ARC
    return bundles


# ---------------------------------------------------------------------------
# Three-agent lemma constructions (regular agents, mms = 1 each, totals = 3)
# ---------------------------------------------------------------------------

def intersection_allocation(m: int, utils: Sequence[UtilityFunction],
                            q_arc: Arc, i: int, j: int,
                            split_j: Split, c: Rational) -> list[Arc]:
    """Q = q_arc is a c-worthy (to agent i) subset of a bundle of agent j's
    mms-split; distribute the rest of that bundle to its cyclic neighbours so
    agent j keeps two bundles worth >= 1, and give Q to whichever of agent i
    and the third agent values it enough.  Min ratio >= c.
    """
    if len(utils) != 3:
        raise InternalInvariantError("three agents expected")
    k = next(a for a in range(3) if a not in (i, j))
    arcs = [a for a in split_j.bundles if not a.empty]
    host_idx = next(
        idx for idx, a in enumerate(arcs)
        if set(q_arc.goods(m)) <= set(a.goods(m)))
    host = arcs[host_idx]
    pred = arcs[(host_idx - 1) % len(arcs)]
    succ = arcs[(host_idx + 1) % len(arcs)]
    if len(arcs) != 3:
        raise InternalInvariantError("agent j's split must have 3 bundles")
    before_len = (q_arc.start - host.start) % m
    after_len = host.length - before_len - q_arc.length
    b1 = Arc(pred.start, pred.length + before_len)
    b2 = Arc((q_arc.start + q_arc.length) % m, after_len + succ.length)

    def val(agent: int, arc: Arc) -> Rational:
        return bundle_value(utils[agent], arc)

    bundles: list[Optional[Arc]] = [None, None, None]
    if val(k, q_arc) >= c:
        bundles[k] = q_arc
        if val(i, b1) >= 1:
            bundles[i], bundles[j] = b1, b2
        elif val(i, b2) >= 1:
            bundles[i], bundles[j] = b2, b1
        else:
            raise InternalInvariantError(
                "no remainder bundle worth >= 1 to agent i")
    else:
        bundles[i] = q_arc
        if val(k, b1) >= 1:
            bundles[k], bundles[j] = b1, b2
        elif val(k, b2) >= 1:
            bundles[k], bundles[j] = b2, b1
        else:
            raise InternalInvariantError(
                "no remainder bundle worth >= 1 to agent k")
    assert all(b is not None for b in bundles)
    return bundles  # type: ignore[return-value]


def two_bundles_allocation(m: int, utils: Sequence[UtilityFunction],
                           i: int, j: int, split_i: Split,
                           c: Rational) -> list[Arc]:
    """Two different bundles of agent i's mms-split are worth >= c to agent
    j: the third agent picks a bundle worth >= 1 to her, agent j one of the
    remaining c-worthy ones, agent i the last.  Min ratio >= c."""
    k = next(a for a in range(3) if a not in (i, j))
    arcs = list(split_i.bundles)
    k_pick = next(
        (idx for idx, a in enumerate(arcs)
         if bundle_value(utils[k], a) >= 1), None)
    if k_pick is None:
        raise InternalInvariantError(
            "proportional agent must value some bundle at >= 1")
    rest = [idx for idx in range(len(arcs)) if idx != k_pick]
    j_pick = next(
        (idx for idx in rest if bundle_value(utils[j], arcs[idx]) >= c), None)
    if j_pick is None:
        raise InternalInvariantError("second c-worthy bundle missing")
    i_pick = next(idx for idx in rest if idx != j_pick)
    bundles: list[Arc] = [EMPTY_ARC] * 3
    bundles[k], bundles[j], bundles[i] = arcs[k_pick], arcs[j_pick], arcs[i_pick]
    return bundles
