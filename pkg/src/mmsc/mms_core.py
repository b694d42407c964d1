"""Exact maximin-share values and witnessing splits.

mms^(n)(G, u) = max over n-splits of G of the minimum bundle value.  Splits
may contain empty bundles.  Paths use a greedy sweep + binary search on the
integer-rescaled utilities; cycles take the max over the m edge deletions;
trees use a bottom-up greedy; unicyclic graphs combine cycle-edge deletions
with a contracted-cycle tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .model import (
    Arc,
    EMPTY_ARC,
    GoodsGraph,
    MmscError,
    Rational,
    Shape,
    Split,
    UnsupportedShapeError,
    UtilityFunction,
)


@dataclass(frozen=True)
class MmsResult:
    value: Rational
    split: Split


@dataclass(frozen=True)
class RescaledUtility:
    scaled: tuple[int, ...]
    scale: int  # scaled = scale * original, scale = lcm of denominators


def rescale_to_integers(u: UtilityFunction) -> RescaledUtility:
    """Multiply u by the LCM of its denominators so all values are integers."""
    k = math.lcm(*(v.denominator for v in u.values)) if len(u) else 1
    scaled = tuple(int(v * k) for v in u.values)
    return RescaledUtility(scaled, k)


# ---------------------------------------------------------------------------
# Path primitives (integer utilities)
# ---------------------------------------------------------------------------

def _greedy_part_count(values: Sequence[int], q: int) -> int:
    """Maximum number of contiguous parts each of value >= q (q >= 1).

    Sweep left to right, cutting as soon as the running sum reaches q; any
    remainder merges into the last part, which stays >= q.
    """
    count = 0
    acc = 0
    for v in values:
        acc += v
        if acc >= q:
            count += 1
            acc = 0
    return count


def path_q_strong_feasible(values: Sequence[int], n: int, q: int) -> bool:
    """True iff the path splits into n contiguous bundles each worth >= q."""
    if q <= 0:
        return True
    return _greedy_part_count(values, q) >= n


def _binary_search_max(lo: int, hi: int, feasible: Callable[[int], bool]) -> int:
    """Largest q in [lo..hi] with feasible(q), assuming feasible(lo) and
    monotonicity.  Midpoint ceil((p+r)/2) with ranges [k..r] / [p..k-1]."""
    p, r = lo, hi
    while p < r:
        k = -((p + r) // -2)  # ceil
        if feasible(k):
            p = k
        else:
            r = k - 1
    return p


def _mms_path_int(values: Sequence[int], n: int) -> int:
    total = sum(values)
    if n < 1:
        raise MmscError("need at least one agent")
    hi = total // n
    return _binary_search_max(0, hi, lambda q: path_q_strong_feasible(values, n, q))


def _path_cuts(values: Sequence[int], n: int, q: int) -> list[int]:
    """Greedy earliest cut positions splitting the path into n parts >= q.

    Returns the list of part lengths (summing to len(values)).  For q = 0 the
    first n-1 parts are singletons (or empty once goods run out).
    """
    m = len(values)
    lengths: list[int] = []
    if q <= 0:
        for _ in range(n - 1):
            lengths.append(1 if sum(lengths) < m else 0)
        lengths.append(m - sum(lengths))
        return lengths
    acc = 0
    start = 0
    for i, v in enumerate(values):
        acc += v
        if acc >= q and len(lengths) < n - 1:
            lengths.append(i + 1 - start)
            start = i + 1
            acc = 0
    lengths.append(m - start)
    while len(lengths) < n:
        lengths.append(0)
    return lengths


def mms_path(u: UtilityFunction, n: int) -> MmsResult:
    """Exact mms over contiguous n-splits of a path, with a witnessing split."""
    r = rescale_to_integers(u)
    q = _mms_path_int(r.scaled, n)
    lengths = _path_cuts(r.scaled, n, q)
    arcs = []
    pos = 0
    for length in lengths:
        arcs.append(Arc(pos, length) if length else EMPTY_ARC)
        pos += length
    return MmsResult(Fraction(q, r.scale), Split(tuple(arcs)))


# ---------------------------------------------------------------------------
# Cycles
# ---------------------------------------------------------------------------

def mms_cycle(u: UtilityFunction, n: int) -> MmsResult:
    """mms on a cycle: for n >= 2, max over the m edge deletions of the path
    mms; for n = 1 the whole cycle."""
    m = len(u)
    if n == 1:
        return MmsResult(u.total, Split((Arc(0, m),)))
    r = rescale_to_integers(u)
    best_q = -1
    best_edges: set[int] = set()
    for e in range(m):
        rotated = [r.scaled[(e + 1 + i) % m] for i in range(m)]
        best_q = max(best_q, _mms_path_int(rotated, n))
    # Reconstruct: among deletions achieving best_q, pick the split with the
    # lexicographically smallest cut-edge set (edge i joins goods i, i+1).
    best_cuts: Optional[tuple[int, ...]] = None
    best_arcs: Optional[list[Arc]] = None
    for e in range(m):
        rotated = [r.scaled[(e + 1 + i) % m] for i in range(m)]
        if not path_q_strong_feasible(rotated, n, best_q):
            continue
        lengths = _path_cuts(rotated, n, best_q)
        arcs = []
        pos = (e + 1) % m
        cuts = []
        for length in lengths:
            arcs.append(Arc(pos, length) if length else EMPTY_ARC)
            if length:
                cuts.append((pos + length - 1) % m)
            pos = (pos + length) % m
        cut_key = tuple(sorted(set(cuts) | {e}))
        if best_cuts is None or cut_key < best_cuts:
            best_cuts = cut_key
            best_arcs = arcs
    assert best_arcs is not None
    return MmsResult(Fraction(best_q, r.scale), Split(tuple(best_arcs)))


# ---------------------------------------------------------------------------
# Trees
# ---------------------------------------------------------------------------

def _tree_order(adj: Sequence[Sequence[int]], root: int,
                alive: Optional[set] = None) -> tuple[list[int], list[int]]:
    """(postorder, parent) of the subtree of `alive` vertices containing root."""
    parent = [-1] * len(adj)
    order = []
    stack = [root]
    seen = {root}
    while stack:
        v = stack.pop()
        order.append(v)
        for w in adj[v]:
            if w not in seen and (alive is None or w in alive):
                seen.add(w)
                parent[w] = v
                stack.append(w)
    order.reverse()  # children before parents
    return order, parent


def _tree_greedy(values: Sequence[int], adj: Sequence[Sequence[int]],
                 q: int, root: int = 0) -> list[list[int]]:
    """Greedy bottom-up chunks each of value >= q (q >= 1), in cut order."""
    order, parent = _tree_order(adj, root)
    acc = list(values)
    comp: list[list[int]] = [[v] for v in range(len(adj))]
    chunks: list[list[int]] = []
    for v in order:
        if acc[v] >= q:
            chunks.append(comp[v])
            comp[v] = []
        elif parent[v] >= 0:
            p = parent[v]
            acc[p] += acc[v]
            comp[p].extend(comp[v])
            comp[v] = []
    return chunks


def _mms_tree_scaled(values: Sequence[int], adj: Sequence[Sequence[int]],
                     n: int) -> tuple[int, list[frozenset]]:
    total = sum(values)
    feasible = (lambda q: q <= 0
                or len(_tree_greedy(values, adj, q)) >= n)
    q = _binary_search_max(0, total // n, feasible)
    m = len(values)
    if q == 0:
        order, _ = _tree_order(adj, 0)
        # Peel single leaves (postorder prefixes are pendant) for n-1 bundles.
        bundles = [frozenset([order[i]]) for i in range(min(n - 1, m - 1))]
        used = set().union(*bundles) if bundles else set()
        bundles.append(frozenset(set(range(m)) - used))
        while len(bundles) < n:
            bundles.append(frozenset())
        return 0, bundles
    chunks = _tree_greedy(values, adj, q)
    bundles = [frozenset(c) for c in chunks[: n - 1]]
    used = set().union(*bundles) if bundles else set()
    bundles.append(frozenset(set(range(m)) - used))
    return q, bundles


def mms_tree(tree: GoodsGraph, u: UtilityFunction, n: int) -> MmsResult:
    """Exact mms over connected n-splits of a tree (paths accepted)."""
    if tree.shape not in (Shape.TREE, Shape.PATH):
        raise UnsupportedShapeError("mms_tree requires a tree or path")
    r = rescale_to_integers(u)
    q, bundles = _mms_tree_scaled(r.scaled, tree.adjacency(), n)
    return MmsResult(Fraction(q, r.scale), Split(tuple(bundles)))


# ---------------------------------------------------------------------------
# Unicyclic graphs
# ---------------------------------------------------------------------------

def find_cycle(g: GoodsGraph) -> list[int]:
    """Vertices of the unique cycle of a unicyclic graph, in cycle order."""
    adj = g.adjacency()
    deg = [len(a) for a in adj]
    alive = set(range(g.m))
    leaves = [v for v in alive if deg[v] == 1]
    while leaves:
        v = leaves.pop()
        alive.discard(v)
        for w in adj[v]:
            if w in alive:
                deg[w] -= 1
                if deg[w] == 1:
                    leaves.append(w)
    # Order the surviving vertices around the cycle.
    start = min(alive)
    order = [start]
    prev = -1
    while True:
        nxt = next(w for w in adj[order[-1]] if w in alive and w != prev)
        if nxt == start:
            break
        prev = order[-1]
        order.append(nxt)
    return order


def mms_unicyclic(g: GoodsGraph, u: UtilityFunction, n: int) -> MmsResult:
    """mms on a unicyclic graph: max over cycle-edge deletions of the tree
    mms and the contracted-cycle tree value."""
    if g.shape is Shape.CYCLE:
        return mms_cycle(u, n)
    if g.shape in (Shape.TREE, Shape.PATH):
        return mms_tree(g, u, n)
    if g.shape is not Shape.UNICYCLIC:
        raise UnsupportedShapeError("mms_unicyclic requires unicyclic/cycle")
    if n == 1:
        return MmsResult(u.total, Split((frozenset(range(g.m)),)))
    r = rescale_to_integers(u)
    cyc = find_cycle(g)
    cyc_edges = [tuple(sorted((cyc[i], cyc[(i + 1) % len(cyc)])))
                 for i in range(len(cyc))]
    adj = g.adjacency()

    best_q = -1
    best_bundles: Optional[list[frozenset]] = None
    for a, b in sorted(set(cyc_edges)):
        adj_del = [[w for w in adj[v] if (v, w) not in ((a, b), (b, a))]
                   for v in range(g.m)]
        q, bundles = _mms_tree_scaled(r.scaled, adj_del, n)
        if q > best_q:
            best_q, best_bundles = q, bundles
    # Contracted graph: the cycle becomes a supernode holding its total value.
    cyc_set = set(cyc)
    others = [v for v in range(g.m) if v not in cyc_set]
    index = {v: i for i, v in enumerate(others)}
    super_idx = len(others)
    c_values = [r.scaled[v] for v in others] + [sum(r.scaled[v] for v in cyc)]
    c_adj: list[list[int]] = [[] for _ in range(super_idx + 1)]
    for a, b in g.edges:
        if a in cyc_set and b in cyc_set:
            continue
        ia = index.get(a, super_idx)
        ib = index.get(b, super_idx)
        c_adj[ia].append(ib)
        c_adj[ib].append(ia)
    q, bundles = _mms_tree_scaled(c_values, c_adj, n)
    if q > best_q:
        best_q = q
        best_bundles = [
            frozenset().union(*(({others[x]} if x != super_idx else cyc_set)
                                for x in b)) if b else frozenset()
            for b in bundles
        ]
    assert best_bundles is not None
    return MmsResult(Fraction(best_q, r.scale), Split(tuple(best_bundles)))


def _mms_cycle_int(values: Sequence[int], n: int) -> int:
    if n == 1:
        return sum(values)
    m = len(values)
    best = 0
    for e in range(m):
        rotated = [values[(e + 1 + i) % m] for i in range(m)]
        best = max(best, _mms_path_int(rotated, n))
    return best


def mms_value_int(g: GoodsGraph, values: Sequence[int], n: int) -> int:
    """Value-only mms for integer utilities (no split reconstruction)."""
    if g.shape is Shape.CYCLE:
        return _mms_cycle_int(values, n)
    if g.shape in (Shape.TREE, Shape.PATH):
        if n == 1:
            return sum(values)
        return _mms_tree_scaled(values, g.adjacency(), n)[0]
    if g.shape is Shape.UNICYCLIC:
        u = UtilityFunction(tuple(Fraction(v) for v in values))
        return int(mms_unicyclic(g, u, n).value)
    raise UnsupportedShapeError(f"no exact mms for shape {g.shape}")


def mms_for_graph(g: GoodsGraph, u: UtilityFunction, n: int) -> MmsResult:
    """Dispatch mms computation by graph shape (general graphs unsupported)."""
    if g.shape is Shape.CYCLE:
        return mms_cycle(u, n)
    if g.shape in (Shape.TREE, Shape.PATH):
        return mms_tree(g, u, n)
    if g.shape is Shape.UNICYCLIC:
        return mms_unicyclic(g, u, n)
    raise UnsupportedShapeError(f"no exact mms for shape {g.shape}")
