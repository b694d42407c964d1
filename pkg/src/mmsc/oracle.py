"""Brute-force ground truth on small instances.

Enumerates every split (cycles: arc splits from cut-edge subsets; general
graphs: recursive growth of connected parts), from which it derives exact mms
values, mms-allocation existence (bipartite matching against per-agent
thresholds), and the maximum achievable guarantee coefficient (bottleneck
assignment, binary search over candidate ratios).  Refuses over-budget inputs
rather than approximating.  Internally utilities are rescaled to integers so
the hot loops stay in integer arithmetic; results are exact rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Optional, Sequence, Union

from ._matching import perfect_matching
from .model import (
    Allocation,
    Arc,
    Bundle,
    EMPTY_ARC,
    GoodsGraph,
    Instance,
    OverBudgetError,
    Rational,
    Shape,
    Split,
    UtilityFunction,
)
from .mms_core import rescale_to_integers


@dataclass
class OracleBudget:
    max_cycle_goods: int = 12
    max_general_goods: int = 10
    max_work: int = 10 ** 7
    _spent: int = field(default=0, repr=False)

    def check_goods(self, g: GoodsGraph) -> None:
        limit = (self.max_cycle_goods
                 if g.shape in (Shape.CYCLE, Shape.PATH)
                 else self.max_general_goods)
        if g.m > limit:
            raise OverBudgetError(
                f"{g.m} goods on a {g.shape.value} graph exceeds the oracle "
                f"budget of {limit}")

    def charge(self, units: int = 1) -> None:
        self._spent += units
        if self._spent > self.max_work:
            raise OverBudgetError(f"oracle work exceeded {self.max_work} units")


def enumerate_cycle_splits(m: int, n: int,
                           budget: Optional[OracleBudget] = None,
                           include_empty: bool = True) -> Iterator[Split]:
    """Every n-split of an m-cycle into arcs.

    A choice of j cut edges (edge c joins goods c and c+1 mod m) yields j
    non-empty arcs; the first arc starts after the largest cut (the cut that
    wraps past good m-1), fixing bundle order so rotations are not double
    counted.  Splits with fewer than n non-empty arcs are padded with empty
    bundles.
    """
    budget = budget or OracleBudget()
    if m > budget.max_cycle_goods:
        raise OverBudgetError(f"{m} goods exceeds the cycle budget")
    lo = 1 if include_empty else min(n, m)
    for j in range(lo, min(n, m) + 1):
        for cuts in combinations(range(m), j):
            budget.charge()
            arcs = []
            prev = cuts[-1]
            for c in cuts:
                start = (prev + 1) % m
                arcs.append(Arc(start, (c - start) % m + 1))
                prev = c
            arcs.extend([EMPTY_ARC] * (n - j))
            yield Split(tuple(arcs))


def _connected_subsets(adj: Sequence[Sequence[int]], seed: int,
                       allowed: frozenset) -> Iterator[frozenset]:
    """All connected vertex subsets of `allowed` containing `seed`.

    Classic extension/forbidden enumeration: each subset is produced exactly
    once.
    """

    def grow(part: frozenset, extension: tuple[int, ...],
             forbidden: frozenset) -> Iterator[frozenset]:
        yield part
        for idx, v in enumerate(extension):
            new_part = part | {v}
            known = set(new_part) | forbidden | set(extension[:idx + 1])
            new_ext = list(extension[idx + 1:])
            for w in adj[v]:
                if w in allowed and w not in known and w not in new_ext:
                    new_ext.append(w)
            yield from grow(new_part, tuple(new_ext),
                            forbidden | set(extension[:idx]))

    ext = tuple(w for w in adj[seed] if w in allowed)
    yield from grow(frozenset([seed]), ext, frozenset())


def enumerate_connected_splits(g: GoodsGraph, n: int,
                               budget: Optional[OracleBudget] = None,
                               include_empty: bool = True) -> Iterator[Split]:
    """All splits of g into <= n connected parts, padded with empties."""
    budget = budget or OracleBudget()
    budget.check_goods(g)
    adj = g.adjacency()

    def rec(uncovered: frozenset,
            parts: tuple[frozenset, ...]) -> Iterator[tuple[frozenset, ...]]:
        if not uncovered:
            yield parts
            return
        if len(parts) == n:
            return
        seed = min(uncovered)
        for subset in _connected_subsets(adj, seed, uncovered):
            budget.charge()
            yield from rec(uncovered - subset, parts + (subset,))

    for parts in rec(frozenset(range(g.m)), ()):
        if not include_empty and len(parts) < n:
            continue
        yield Split(tuple(parts) + (frozenset(),) * (n - len(parts)))


def _splits(g: GoodsGraph, n: int, budget: OracleBudget,
            include_empty: bool = True) -> Iterator[Split]:
    if g.shape is Shape.CYCLE and g.m >= 3:
        yield from enumerate_cycle_splits(g.m, n, budget, include_empty)
    else:
        yield from enumerate_connected_splits(g, n, budget, include_empty)


class _FastValues:
    """O(1) integer bundle values (prefix sums for arcs)."""

    def __init__(self, inst: Instance):
        self.m = inst.m
        rescaled = [rescale_to_integers(u) for u in inst.agents]
        self.scaled = [r.scaled for r in rescaled]
        self.scales = [r.scale for r in rescaled]
        self.prefix = []
        for vals in self.scaled:
            p = [0]
            for v in vals:
                p.append(p[-1] + v)
            self.prefix.append(p)

    def value(self, agent: int, b: Bundle) -> int:
        if isinstance(b, Arc):
            if b.empty:
                return 0
            p = self.prefix[agent]
            end = b.start + b.length
            if end <= self.m:
                return p[end] - p[b.start]
            return p[self.m] - p[b.start] + p[end - self.m]
        vals = self.scaled[agent]
        return sum(vals[x] for x in b)


def _oracle_mms_int(g: GoodsGraph, scaled: Sequence[int], n: int,
                    budget: OracleBudget) -> int:
    """Exact integer mms by enumeration (utilities already integral)."""
    m = g.m
    if m < n:
        return 0
    prefix = [0]
    for v in scaled:
        prefix.append(prefix[-1] + v)

    def value(b: Bundle) -> int:
        if isinstance(b, Arc):
            if b.empty:
                return 0
            end = b.start + b.length
            if end <= m:
                return prefix[end] - prefix[b.start]
            return prefix[m] - prefix[b.start] + prefix[end - m]
        return sum(scaled[x] for x in b)

    best = 0
    for split in _splits(g, n, budget, include_empty=False):
        budget.charge()
        best = max(best, min(value(b) for b in split.bundles))
    return best


def oracle_mms(g: GoodsGraph, u: UtilityFunction, n: int,
               budget: Optional[OracleBudget] = None) -> Rational:
    """Exact mms by enumeration of all n-splits."""
    budget = budget or OracleBudget()
    budget.check_goods(g)
    r = rescale_to_integers(u)
    return Fraction(_oracle_mms_int(g, r.scaled, n, budget), r.scale)


def oracle_exists_mms_allocation(
        inst: Instance,
        budget: Optional[OracleBudget] = None) -> Optional[Allocation]:
    """An mms-allocation if some split admits a perfect threshold matching."""
    budget = budget or OracleBudget()
    budget.check_goods(inst.graph)
    fast = _FastValues(inst)
    n = inst.n
    mms_int = [_oracle_mms_int(inst.graph, fast.scaled[i], n, budget)
               for i in range(n)]
    for split in _splits(inst.graph, n, budget):
        budget.charge(n)
        values = [[fast.value(i, b) for b in split.bundles] for i in range(n)]
        adj = [[j for j in range(n) if values[i][j] >= mms_int[i]]
               for i in range(n)]
        match = perfect_matching(n, adj)
        if match is not None:
            bundles = tuple(split.bundles[match[i]] for i in range(n))
            return Allocation(bundles, provenance="oracle")
    return None


def oracle_max_c(inst: Instance,
                 budget: Optional[OracleBudget] = None) -> Union[Rational, float]:
    """Maximum c such that a c-sufficient allocation exists.

    Per split, the best bottleneck assignment of min_i value_i / mms_i
    (agents with mms = 0 excluded from the bottleneck but still assigned a
    bundle); the answer is the max over splits.  Ratios are compared on a
    common integer scale; the work per split is a binary search over its
    candidate ratios with a matching feasibility test.  If every agent has
    mms = 0 the result is +infinity (any split is c-sufficient for all c).
    """
    budget = budget or OracleBudget()
    budget.check_goods(inst.graph)
    fast = _FastValues(inst)
    n = inst.n
    mms_int = [_oracle_mms_int(inst.graph, fast.scaled[i], n, budget)
               for i in range(n)]
    active = [i for i in range(n) if mms_int[i] > 0]
    if not active:
        return math.inf
    scale = math.lcm(*(mms_int[i] for i in active))
    mult = [scale // mms_int[i] if mms_int[i] > 0 else 0 for i in range(n)]

    best = -1  # best bottleneck on the common scale
    for split in _splits(inst.graph, n, budget):
        budget.charge(n * n)
        # ratio on the common scale: value * mult (== scale * value/mms)
        rows = [[fast.value(i, b) * mult[i] for b in split.bundles]
                for i in active]
        upper = min(max(row) for row in rows)
        if upper <= best:
            continue
        candidates = sorted({x for row in rows for x in row if x > best})
        allow_all = [i for i in range(n) if mms_int[i] == 0]
        scaled_rows = {i: rows[k] for k, i in enumerate(active)}

        def feasible(threshold: int) -> bool:
            adj = [list(range(n)) if i in allow_all else
                   [j for j in range(n) if scaled_rows[i][j] >= threshold]
                   for i in range(n)]
            return perfect_matching(n, adj) is not None

        if not feasible(candidates[0]):
            continue
        lo, hi = 0, len(candidates) - 1
        while lo < hi:
            mid = -((lo + hi) // -2)
            if feasible(candidates[mid]):
                lo = mid
            else:
                hi = mid - 1
        best = max(best, candidates[lo])
    if best < 0:
        # Every split's bottleneck is at most the incumbent -1 < 0: impossible
        # since values are non-negative, but guard for all-zero utilities.
        return Fraction(0)
    return Fraction(best, scale)
