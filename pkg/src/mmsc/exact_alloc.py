"""Exact mms-allocation constructors and deciders.

Covers every case the theory settles exactly: trees (deepest-satisfying-
subtree greedy), at most one deviant agent type, cycles with m < 2n, the
m = 2n decider, three agents with at most eight goods, and the fixed-type
dynamic program over path prefixes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from ._cycle_ops import arc_containing, cut_edges, intersection_allocation
from ._matching import perfect_matching
from .mms_core import mms_cycle, mms_for_graph, mms_path, mms_tree
from .model import (
    Allocation,
    Arc,
    EMPTY_ARC,
    Instance,
    InternalInvariantError,
    PreconditionError,
    Rational,
    Shape,
    Split,
    UnsupportedShapeError,
    UtilityFunction,
    bundle_value,
    validate_split,
)
from .regularize import TRIVIAL, regularize


def _assert_ratios(inst: Instance, alloc: Allocation,
                   mms_values: Sequence[Rational]) -> Allocation:
    if not validate_split(inst.graph, Split(alloc.bundles)):
        raise InternalInvariantError(f"{alloc.provenance}: invalid split")
    for u, b, q in zip(inst.agents, alloc.bundles, mms_values):
        if bundle_value(u, b) < q:
            raise InternalInvariantError(
                f"{alloc.provenance}: bundle below mms")
    return alloc


# ---------------------------------------------------------------------------
# Trees
# ---------------------------------------------------------------------------

def _subtree_tables(adj: Sequence[Sequence[int]], alive: set,
                    root: int) -> tuple[list[int], list[int], list[int]]:
    """(postorder, parent, depth) of the alive subtree containing root."""
    parent = {root: -1}
    depth = {root: 0}
    order = [root]
    stack = [root]
    seen = {root}
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w in alive and w not in seen:
                seen.add(w)
                parent[w] = v
                depth[w] = depth[v] + 1
                order.append(w)
                stack.append(w)
    return order, parent, depth


def allocate_tree_with_targets(adj: Sequence[Sequence[int]],
                               utilities: Sequence[UtilityFunction],
                               targets: Sequence[Rational]) -> list[frozenset]:
    """Deepest-satisfying-subtree greedy.

    Repeatedly pick, among remaining agents, the (agent, vertex) pair with
    the deepest vertex whose remaining subtree is worth >= the agent's
    target; assign and remove that subtree.  The last agent takes the
    remainder.  Ties: deeper vertex first, then smaller vertex, then smaller
    agent index.
    """
    m = len(adj)
    n = len(utilities)
    alive = set(range(m))
    remaining = list(range(n))
    bundles: list[frozenset] = [frozenset()] * n
    while len(remaining) > 1 and alive:
        root = min(alive)
        order, parent, depth = _subtree_tables(adj, alive, root)
        if len(order) != len(alive):
            raise InternalInvariantError("remaining goods are disconnected")
        subval = {i: {v: utilities[i][v] for v in order} for i in remaining}
        for v in reversed(order):
            p = parent[v]
            if p >= 0:
                for i in remaining:
                    subval[i][p] += subval[i][v]
        best = None  # (-depth, vertex, agent)
        for i in remaining:
            for v in order:
                if subval[i][v] >= targets[i]:
                    key = (-depth[v], v, i)
                    if best is None or key < best:
                        best = key
        if best is None:
            raise InternalInvariantError(
                "no satisfying subtree: tree-allocation greedy failed")
        _, v, agent = best
        subtree = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for w in adj[x]:
                if w in alive and w not in subtree and parent.get(w) == x:
                    subtree.add(w)
                    stack.append(w)
        bundles[agent] = frozenset(subtree)
        alive -= subtree
        remaining.remove(agent)
    if remaining:
        last = remaining[0]
        bundles[last] = frozenset(alive)
        if bundle_value(utilities[last], bundles[last]) < targets[last]:
            raise InternalInvariantError("remainder below the last target")
        for i in remaining[1:]:
            if targets[i] > 0:
                raise InternalInvariantError("agent with positive target left")
    return bundles


def allocate_tree(inst: Instance) -> Allocation:
    """An mms-allocation on a tree or path: every agent gets >= her mms."""
    g = inst.graph
    if g.shape not in (Shape.TREE, Shape.PATH):
        raise UnsupportedShapeError("allocate_tree requires a tree or path")
    mms = [mms_tree(g, u, inst.n).value for u in inst.agents]
    bundles = allocate_tree_with_targets(g.adjacency(), inst.agents, mms)
    alloc = Allocation(tuple(bundles), provenance="allocate_tree")
    return _assert_ratios(inst, alloc, mms)


# ---------------------------------------------------------------------------
# One deviant type
# ---------------------------------------------------------------------------

def allocate_one_deviant(inst: Instance) -> Allocation:
    """All agents share one utility except at most one (n = 2 included):
    the deviant takes the shared mms-split bundle she values most."""
    n = inst.n
    if n == 1:
        whole: Sequence = (
            Arc(0, inst.m) if inst.graph.shape in (Shape.CYCLE, Shape.PATH)
            else frozenset(range(inst.m)))
        return Allocation((whole,), provenance="allocate_one_deviant")
    distinct = {u.values for u in inst.agents}
    if len(distinct) > 2:
        raise PreconditionError("more than one deviant type")
    if len(distinct) == 2:
        counts = {v: sum(1 for u in inst.agents if u.values == v)
                  for v in distinct}
        if min(counts.values()) > 1 and n > 2:
            raise PreconditionError("more than one deviant agent")
        # The deviant is an agent of the rarer utility (ties: last agent).
        rare = min(counts, key=lambda v: (counts[v],))
        deviant = max(i for i, u in enumerate(inst.agents)
                      if u.values == rare)
    else:
        deviant = n - 1
    shared = next(u for i, u in enumerate(inst.agents) if i != deviant)
    res = mms_for_graph(inst.graph, shared, n)
    order = sorted(
        range(n),
        key=lambda b: (-bundle_value(inst.agents[deviant], res.split.bundles[b]),
                       b))
    bundles: list = [None] * n
    bundles[deviant] = res.split.bundles[order[0]]
    rest = [i for i in range(n) if i != deviant]
    for agent, b in zip(rest, sorted(order[1:])):
        bundles[agent] = res.split.bundles[b]
    alloc = Allocation(tuple(bundles), provenance="allocate_one_deviant")
    mms = [mms_for_graph(inst.graph, u, n).value if i == deviant else res.value
           for i, u in enumerate(inst.agents)]
    return _assert_ratios(inst, alloc, mms)


# ---------------------------------------------------------------------------
# Cycles: m < 2n and m = 2n
# ---------------------------------------------------------------------------

def _cycle_path_after(x: int, m: int) -> list[int]:
    """Goods of C - x in clockwise order starting after x."""
    return [(x + 1 + i) % m for i in range(m - 1)]


def _allocate_cycle_after_singleton(inst: Instance, x: int,
                                    owner: int) -> list[Arc]:
    """Assign {x} to `owner` and tree-allocate the path C - x to the rest,
    each at her own path mms (>= her cycle mms)."""
    m = inst.m
    path_goods = _cycle_path_after(x, m)
    others = [i for i in range(inst.n) if i != owner]
    path_adj: list[list[int]] = [
        [j for j in (k - 1, k + 1) if 0 <= j < m - 1]
        for k in range(m - 1)]
    utils = []
    targets = []
    for i in others:
        vals = tuple(inst.agents[i][g] for g in path_goods)
        u = UtilityFunction(vals)
        utils.append(u)
        targets.append(mms_path(u, len(others)).value)
    parts = allocate_tree_with_targets(path_adj, utils, targets)
    bundles: list[Arc] = [EMPTY_ARC] * inst.n
    bundles[owner] = Arc(x, 1)
    for i, part in zip(others, parts):
        if not part:
            bundles[i] = EMPTY_ARC
            continue
        idx = sorted(part)
        if idx != list(range(idx[0], idx[-1] + 1)):
            raise InternalInvariantError("path bundle is not an interval")
        bundles[i] = Arc(path_goods[idx[0]], len(idx))
    return bundles


def allocate_cycle_m_lt_2n(inst: Instance) -> Allocation:
    """m < 2n on a cycle: agent n has a singleton worth her mms (pigeonhole
    on her mms-split); give it to her and tree-allocate the remaining path."""
    if inst.graph.shape is not Shape.CYCLE:
        raise UnsupportedShapeError("cycle required")
    if inst.m >= 2 * inst.n:
        raise PreconditionError("requires m < 2n")
    n = inst.n
    if n == 1:
        return Allocation((Arc(0, inst.m),), provenance="allocate_cycle_m_lt_2n")
    mms = [mms_cycle(u, n).value for u in inst.agents]
    last = n - 1
    x = next((g for g in range(inst.m) if inst.agents[last][g] >= mms[last]),
             None)
    if x is None:
        raise InternalInvariantError("pigeonhole singleton missing")
    bundles = _allocate_cycle_after_singleton(inst, x, last)
    alloc = Allocation(tuple(bundles), provenance="allocate_cycle_m_lt_2n")
    return _assert_ratios(inst, alloc, mms)


def decide_cycle_m_eq_2n(inst: Instance) -> Optional[Allocation]:
    """m = 2n on a cycle: an mms-allocation or NONE (None).

    If some agent values a single good at her mms, proceed as in m < 2n.
    Otherwise every bundle of a hypothetical mms-allocation has exactly two
    goods, so only the two pair-splits remain; test each with a bipartite
    matching against the agents' mms thresholds.
    """
    if inst.graph.shape is not Shape.CYCLE:
        raise UnsupportedShapeError("cycle required")
    n, m = inst.n, inst.m
    if m != 2 * n:
        raise PreconditionError("requires m = 2n")
    mms = [mms_cycle(u, n).value for u in inst.agents]
    singletons = [(i, g) for i in range(n) for g in range(m)
                  if inst.agents[i][g] >= mms[i]]
    if singletons:
        i, x = min(singletons)
        bundles = _allocate_cycle_after_singleton(inst, x, i)
        alloc = Allocation(tuple(bundles),
                           provenance="decide_cycle_m_eq_2n/singleton")
        return _assert_ratios(inst, alloc, mms)
    for offset in (0, 1):
        pairs = [Arc((2 * k + offset) % m, 2) for k in range(n)]
        adj = [[j for j, p in enumerate(pairs)
                if bundle_value(inst.agents[i], p) >= mms[i]]
               for i in range(n)]
        match = perfect_matching(n, adj)
        if match is not None:
            bundles = tuple(pairs[match[i]] for i in range(n))
            alloc = Allocation(bundles, provenance="decide_cycle_m_eq_2n")
            return _assert_ratios(inst, alloc, mms)
    return None


# ---------------------------------------------------------------------------
# Three agents, at most eight goods
# ---------------------------------------------------------------------------

def allocate_three_agents_small(inst: Instance) -> Allocation:
    """n = 3, m <= 8 on a cycle: an mms-allocation always exists.

    After regularization the three mms-splits have nine cut edges on at most
    eight cycle edges, so two splits share a cut edge; the bundles starting
    at that shared edge are nested, and the contained bundle plays the role
    of the c = 1 intersection in the three-agent lemma.
    """
    if inst.graph.shape is not Shape.CYCLE:
        raise UnsupportedShapeError("cycle required")
    if inst.n != 3 or inst.m > 8:
        raise PreconditionError("requires n = 3 and m <= 8")
    m = inst.m
    mms = [mms_cycle(u, 3).value for u in inst.agents]
    reg = regularize(inst)
    if reg is TRIVIAL:
        bundles = (Arc(0, m), EMPTY_ARC, EMPTY_ARC)
        return Allocation(bundles, provenance="allocate_three_agents_small")
    reg_inst, cert = reg
    splits = [mms_cycle(u, 3).split for u in reg_inst.agents]
    cuts = [cut_edges(s, m) for s in splits]
    shared = None
    for a in range(3):
        for b in range(a + 1, 3):
            common = set(cuts[a]) & set(cuts[b])
            if common:
                shared = (a, b, min(common))
                break
        if shared:
            break
    if shared is None:
        raise InternalInvariantError("nine cuts on <= 8 edges must collide")
    a, b, e = shared
    start = (e + 1) % m
    arc_a = splits[a].bundles[arc_containing(splits[a], start, m)]
    arc_b = splits[b].bundles[arc_containing(splits[b], start, m)]
    # Both arcs start at e+1; the shorter is contained in the longer.
    if arc_a.length <= arc_b.length:
        inner_agent, outer_agent, inner = a, b, arc_a
    else:
        inner_agent, outer_agent, inner = b, a, arc_b
    bundles = intersection_allocation(
        m, reg_inst.agents, inner, inner_agent, outer_agent,
        splits[outer_agent], Fraction(1))
    alloc = Allocation(tuple(bundles),
                       provenance="allocate_three_agents_small")
    return _assert_ratios(inst, alloc, mms)


# ---------------------------------------------------------------------------
# Fixed number of types: dynamic programming on the cut-open cycle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TypeProfile:
    utilities: tuple[UtilityFunction, ...]  # one per type
    counts: tuple[int, ...]                 # agents per type
    targets: tuple[Rational, ...]           # q_r per type

    @property
    def t(self) -> int:
        return len(self.utilities)


@dataclass(frozen=True)
class DpTables:
    k_table: tuple[tuple[Optional[int], ...], ...]  # [r][j] -> min k or None
    t_table: dict  # H -> T(H) (None = infeasible)
    back: dict     # H -> chosen type r

    def final(self, profile: TypeProfile) -> Optional[int]:
        return self.t_table.get(profile.counts)


def build_dp_tables(path_utilities: Sequence[UtilityFunction],
                    profile: TypeProfile) -> DpTables:
    """Tables for the fixed-type theorem on a path v_1..v_m.

    k(j, r) is the minimum k >= j with u_r({v_{j+1}..v_k}) >= q_r (None if
    impossible); T(H) = min over types r with h_r > 0 of k(T(H_r^-), r),
    processed in non-decreasing sum order, with the minimizing r recorded
    (smallest r on ties).
    """
    m = len(path_utilities[0]) if path_utilities else 0
    t = profile.t
    k_table: list[list[Optional[int]]] = []
    for r in range(t):
        u = path_utilities[r]
        q = profile.targets[r]
        row: list[Optional[int]] = [None] * (m + 1)
        # Two pointers: for increasing j the minimal k is non-decreasing.
        k = 0
        acc = Fraction(0)
        for j in range(m + 1):
            if j > 0:
                acc -= u[j - 1]
            if k < j:
                k = j
                acc = Fraction(0)
            while acc < q and k < m:
                acc += u[k]
                k += 1
            row[j] = k if acc >= q else None
        k_table.append(row)

    # Enumerate H = (h_1..h_t), 0 <= h_r <= s_r, by non-decreasing sum.
    def profiles_by_sum():
        import itertools
        ranges = [range(s + 1) for s in profile.counts]
        hs = sorted(itertools.product(*ranges), key=sum)
        return hs

    t_table: dict = {tuple([0] * t): 0}
    back: dict = {}
    for H in profiles_by_sum():
        if sum(H) == 0:
            continue
        best: Optional[int] = None
        best_r: Optional[int] = None
        for r in range(t):
            if H[r] == 0:
                continue
            prev = list(H)
            prev[r] -= 1
            j = t_table.get(tuple(prev))
            if j is None:
                continue
            k = k_table[r][j]
            if k is not None and (best is None or k < best):
                best, best_r = k, r
        t_table[H] = best
        if best_r is not None:
            back[H] = best_r
    return DpTables(tuple(tuple(r) for r in k_table), t_table, back)


def _profile_from_instance(inst: Instance) -> tuple[TypeProfile, list[list[int]]]:
    if inst.type_ids is None:
        raise PreconditionError("type partition required")
    groups = inst.type_groups()
    utils = tuple(inst.agents[g[0]] for g in groups)
    counts = tuple(len(g) for g in groups)
    targets = tuple(mms_cycle(u, inst.n).value for u in utils)
    return TypeProfile(utils, counts, targets), groups


def allocate_cycle_fixed_types(inst: Instance) -> Optional[Allocation]:
    """Decide mms-allocation existence on a cycle for typed agents.

    For each edge deletion, run the dynamic program on the resulting path;
    the first success (smallest deleted edge) is backtracked into an
    allocation.  None if every edge fails.
    """
    if inst.graph.shape is not Shape.CYCLE:
        raise UnsupportedShapeError("cycle required")
    n, m = inst.n, inst.m
    profile, groups = _profile_from_instance(inst)
    mms: list[Rational] = [Fraction(0)] * n
    for r, g in enumerate(groups):
        for i in g:
            mms[i] = profile.targets[r]
    if n > m:
        # Every mms is 0; hand everything to agent 0.
        assert all(q == 0 for q in profile.targets)
        bundles = [EMPTY_ARC] * n
        bundles[0] = Arc(0, m)
        return Allocation(tuple(bundles),
                          provenance="allocate_cycle_fixed_types")
    for e in range(m):
        order = [(e + 1 + i) % m for i in range(m)]
        path_utils = [UtilityFunction(tuple(u[g] for g in order))
                      for u in profile.utilities]
        tables = build_dp_tables(path_utils, profile)
        end = tables.final(profile)
        if end is None:
            continue
        # Backtrack: bundles in path order, one per agent slot of each type.
        H = list(profile.counts)
        segments: list[tuple[int, int, int]] = []  # (type, start_j, end_j)
        while sum(H) > 0:
            seg_end = tables.t_table[tuple(H)]
            r = tables.back[tuple(H)]
            H[r] -= 1
            seg_start = tables.t_table[tuple(H)]
            segments.append((r, seg_start, seg_end))
        segments.reverse()
        # Leftover goods after the last segment attach to the final bundle.
        last_seg = max(range(len(segments)), key=lambda i: segments[i][2])
        by_type: dict[int, list[tuple[int, int]]] = {}
        for idx, (r, j0, j1) in enumerate(segments):
            if idx == last_seg and j1 < m:
                j1 = m
            by_type.setdefault(r, []).append((j0, j1))
        bundles_list: list = [EMPTY_ARC] * n
        for r, g in enumerate(groups):
            segs = by_type.get(r, [])
            for agent, (j0, j1) in zip(g, segs):
                length = j1 - j0
                bundles_list[agent] = (
                    Arc(order[j0], length) if length else EMPTY_ARC)
        alloc = Allocation(tuple(bundles_list),
                           provenance="allocate_cycle_fixed_types")
        return _assert_ratios(inst, alloc, mms)
    return None
