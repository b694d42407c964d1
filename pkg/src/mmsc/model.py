"""Core domain types: exact rationals, goods graphs, splits, and allocations.

All arithmetic is exact (``fractions.Fraction``); goods on a cycle are indexed
0..m-1 clockwise.  Bundles are either :class:`Arc` objects (contiguous
segments of a path/cycle) or frozensets of good indices (trees and general
graphs).  Every type is immutable and safe to share.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

#: Exact rational number used everywhere.  ``fractions.Fraction`` already
#: guarantees lowest terms, positive denominator, and exact comparisons.
Rational = Fraction


class MmscError(Exception):
    """Base class for all library errors."""


class MalformedBundleError(MmscError):
    """A bundle references goods outside the graph."""


class UnsupportedShapeError(MmscError):
    """An operation was called with a graph shape it does not support."""


class PreconditionError(MmscError):
    """A documented precondition of an operation was violated."""


class InternalInvariantError(MmscError):
    """A proof-backed invariant failed at runtime: an implementation bug."""


class OverBudgetError(MmscError):
    """The oracle refused an input that exceeds its enumeration budget."""


class Shape(enum.Enum):
    PATH = "path"
    CYCLE = "cycle"
    TREE = "tree"
    UNICYCLIC = "unicyclic"
    GENERAL = "general"


def _normalize_edges(edges: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    return tuple(sorted((min(a, b), max(a, b)) for a, b in edges))


@dataclass(frozen=True)
class GoodsGraph:
    """Connected graph of goods, tagged with its shape."""

    m: int
    shape: Shape
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.m < 1:
            raise MmscError("graph needs at least one good")
        for a, b in self.edges:
            if not (0 <= a < self.m and 0 <= b < self.m) or a == b:
                raise MmscError(f"bad edge ({a}, {b})")
        if len(set(self.edges)) != len(self.edges):
            raise MmscError("duplicate edges")
        if not self._connected():
            raise MmscError("graph must be connected")
        n_edges = len(self.edges)
        if self.shape is Shape.PATH and (n_edges != self.m - 1 or self.m > 1 and max(
                len(nb) for nb in self.adjacency()) > 2):
            raise MmscError("path shape mismatch")
        if self.shape is Shape.CYCLE:
            if self.m < 3:
                # Degenerate cycles of 1 or 2 goods are represented as paths
                # internally but accepted here for uniform CLI handling.
                if n_edges != max(0, self.m - 1):
                    raise MmscError("cycle shape mismatch")
            elif n_edges != self.m or any(len(nb) != 2 for nb in self.adjacency()):
                raise MmscError("cycle shape mismatch")
        if self.shape is Shape.TREE and n_edges != self.m - 1:
            raise MmscError("tree shape mismatch")
        if self.shape is Shape.UNICYCLIC and n_edges != self.m:
            raise MmscError("unicyclic shape mismatch")

    # -- constructors -----------------------------------------------------
    @staticmethod
    def path(m: int) -> "GoodsGraph":
        return GoodsGraph(m, Shape.PATH, tuple((i, i + 1) for i in range(m - 1)))

    @staticmethod
    def cycle(m: int) -> "GoodsGraph":
        edges = [(i, i + 1) for i in range(m - 1)]
        if m >= 3:
            edges.append((0, m - 1))
        return GoodsGraph(m, Shape.CYCLE, _normalize_edges(edges))

    @staticmethod
    def tree(m: int, edges: Iterable[tuple[int, int]]) -> "GoodsGraph":
        return GoodsGraph(m, Shape.TREE, _normalize_edges(edges))

    @staticmethod
    def unicyclic(m: int, edges: Iterable[tuple[int, int]]) -> "GoodsGraph":
        return GoodsGraph(m, Shape.UNICYCLIC, _normalize_edges(edges))

    @staticmethod
    def general(m: int, edges: Iterable[tuple[int, int]]) -> "GoodsGraph":
        return GoodsGraph(m, Shape.GENERAL, _normalize_edges(edges))

    # -- helpers ----------------------------------------------------------
    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.m)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def _connected(self) -> bool:
        if self.m == 1:
            return True
        adj = [[] for _ in range(self.m)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.m


@dataclass(frozen=True)
class UtilityFunction:
    """Non-negative rational utility per good, extended additively."""

    values: tuple[Rational, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "values", tuple(Fraction(v) for v in self.values))
        if any(v < 0 for v in self.values):
            raise MmscError("utilities must be non-negative")

    def __getitem__(self, i: int) -> Rational:
        return self.values[i]

    def __len__(self) -> int:
        return len(self.values)

    @property
    def total(self) -> Rational:
        return sum(self.values, Fraction(0))


@dataclass(frozen=True)
class Arc:
    """Contiguous segment of a cycle/path: goods start..start+length-1 (mod m).

    length 0 is the empty bundle, canonically Arc(0, 0).
    """

    start: int
    length: int

    def __post_init__(self) -> None:
        if self.length < 0 or self.start < 0:
            raise MmscError("bad arc")
        if self.length == 0 and self.start != 0:
            object.__setattr__(self, "start", 0)

    def goods(self, m: int) -> tuple[int, ...]:
        if self.length > m:
            raise MalformedBundleError("arc longer than the cycle")
        return tuple((self.start + i) % m for i in range(self.length))

    @property
    def empty(self) -> bool:
        return self.length == 0

    def end(self, m: int) -> int:
        """Last good of a non-empty arc."""
        if self.empty:
            raise MmscError("empty arc has no end")
        return (self.start + self.length - 1) % m


EMPTY_ARC = Arc(0, 0)

#: A bundle is a contiguous arc (paths/cycles) or an explicit vertex set.
Bundle = Union[Arc, frozenset]


def bundle_goods(b: Bundle, m: int) -> tuple[int, ...]:
    if isinstance(b, Arc):
        return b.goods(m)
    goods = tuple(sorted(b))
    if goods and not (0 <= goods[0] and goods[-1] < m):
        raise MalformedBundleError("bundle references unknown goods")
    return goods


@dataclass(frozen=True)
class Split:
    """Sequence of pairwise disjoint bundles covering all goods."""

    bundles: tuple[Bundle, ...]

    @property
    def n(self) -> int:
        return len(self.bundles)


@dataclass(frozen=True)
class AnchoredSplit:
    """Ordered all-nonempty split of a cycle, clockwise from an anchor good.

    The anchor a lies in arcs[0] (not necessarily at its start); a clockwise
    traversal starting at a meets the arcs in order.
    """

    m: int
    anchor: int
    arcs: tuple[Arc, ...]

    def __post_init__(self) -> None:
        if sum(arc.length for arc in self.arcs) != self.m:
            raise MmscError("anchored split must cover the cycle")
        if any(arc.empty for arc in self.arcs):
            raise MmscError("anchored split arcs must be non-empty")
        first = self.arcs[0]
        if (self.anchor - first.start) % self.m >= first.length:
            raise MmscError("anchor must lie in the first arc")
        pos = (first.start + first.length) % self.m
        for arc in self.arcs[1:]:
            if arc.start != pos:
                raise MmscError("arcs must be consecutive clockwise")
            pos = (arc.start + arc.length) % self.m

    @property
    def n(self) -> int:
        return len(self.arcs)

    def prefix_end_offset(self, i: int) -> int:
        """Clockwise offset from the anchor of the last good of arcs[i].

        The prefix set X_i is the segment [anchor .. last(arcs[i])]; prefix
        containment between two anchored splits reduces to comparing these
        offsets.  Offsets are strictly increasing in i and the last one is
        m - 1 (the prefix covering the whole cycle).
        """
        return (self.arcs[i].end(self.m) - self.anchor) % self.m

    def prefix_set(self, i: int) -> frozenset:
        off = self.prefix_end_offset(i)
        return frozenset((self.anchor + k) % self.m for k in range(off + 1))


@dataclass(frozen=True)
class Instance:
    """A goods graph plus the agents' utilities and optional type partition."""

    graph: GoodsGraph
    agents: tuple[UtilityFunction, ...]
    type_ids: Optional[tuple[int, ...]] = None

    def __post_init__(self) -> None:
        if not self.agents:
            raise MmscError("need at least one agent")
        for u in self.agents:
            if len(u) != self.graph.m:
                raise MmscError("utility length must equal number of goods")
        if self.type_ids is not None:
            if len(self.type_ids) != len(self.agents):
                raise MmscError("one type id per agent")
            rep: dict[int, UtilityFunction] = {}
            for t, u in zip(self.type_ids, self.agents):
                if t in rep and rep[t].values != u.values:
                    raise MmscError("agents of one type must share utilities")
                rep.setdefault(t, u)

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def m(self) -> int:
        return self.graph.m

    def type_groups(self) -> list[list[int]]:
        """Agents grouped by type id (or each agent alone if untyped)."""
        if self.type_ids is None:
            return [[i] for i in range(self.n)]
        groups: dict[int, list[int]] = {}
        for i, t in enumerate(self.type_ids):
            groups.setdefault(t, []).append(i)
        return [groups[t] for t in sorted(groups)]


@dataclass(frozen=True)
class Allocation:
    """Assignment of pairwise disjoint bundles to agents (by index)."""

    bundles: tuple[Bundle, ...]
    provenance: str = ""

    @property
    def n(self) -> int:
        return len(self.bundles)


#: Sentinel ratio for agents whose mms is 0 (any bundle satisfies them).
SATISFIED_TRIVIALLY = "SATISFIED-TRIVIALLY"


@dataclass(frozen=True)
class AgentReport:
    mms: Rational
    value: Rational
    ratio: Optional[Rational]  # None when mms == 0 (trivially satisfied)


@dataclass(frozen=True)
class GuaranteeReport:
    agents: tuple[AgentReport, ...]
    certified_c: Rational

    @property
    def min_ratio(self) -> Optional[Rational]:
        ratios = [a.ratio for a in self.agents if a.ratio is not None]
        return min(ratios) if ratios else None

    def __post_init__(self) -> None:
        mr = self.min_ratio
        if mr is not None and self.certified_c > mr:
            raise InternalInvariantError(
                f"certified c={self.certified_c} exceeds min ratio {mr}")


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def bundle_value(u: UtilityFunction, b: Bundle) -> Rational:
    """Sum of u over the goods of b (0 for the empty bundle)."""
    m = len(u)
    if isinstance(b, Arc):
        goods = b.goods(m)
    else:
        goods = tuple(b)
        if any(not 0 <= x < m for x in goods):
            raise MalformedBundleError("bundle references unknown goods")
    return sum((u[x] for x in goods), Fraction(0))


def is_connected_bundle(g: GoodsGraph, b: Bundle) -> bool:
    """True iff b induces a connected subgraph of g (empty bundles count)."""
    if isinstance(b, Arc):
        if b.empty:
            return True
        if g.shape is Shape.CYCLE:
            return b.length <= g.m
        goods = set(b.goods(g.m))
    else:
        goods = set(b)
    if not goods:
        return True
    if any(not 0 <= x < g.m for x in goods):
        raise MalformedBundleError("bundle references unknown goods")
    adj = g.adjacency()
    start = next(iter(goods))
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w in goods and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == goods


def validate_split(g: GoodsGraph, s: Split) -> bool:
    """True iff s's bundles are disjoint, cover all goods, and are connected."""
    covered: list[int] = []
    for b in s.bundles:
        try:
            goods = bundle_goods(b, g.m)
        except MalformedBundleError:
            return False
        covered.extend(goods)
        if not is_connected_bundle(g, b):
            return False
    return len(covered) == g.m and len(set(covered)) == g.m


def reverse_arc(arc: Arc, m: int) -> Arc:
    """Image of an arc under the reflection good i -> m-1-i."""
    if arc.empty:
        return EMPTY_ARC
    return Arc((m - arc.start - arc.length) % m, arc.length)


def reverse_bundle(b: Bundle, m: int) -> Bundle:
    if isinstance(b, Arc):
        return reverse_arc(b, m)
    return frozenset(m - 1 - x for x in b)


def reverse_orientation(inst: Instance) -> Instance:
    """Mirror a cycle instance: good i becomes good m-1-i."""
    if inst.graph.shape is not Shape.CYCLE:
        raise UnsupportedShapeError("reverse_orientation requires a cycle")
    agents = tuple(UtilityFunction(tuple(reversed(u.values)))
                   for u in inst.agents)
    return Instance(inst.graph, agents, inst.type_ids)


def build_report(inst: Instance, alloc: Allocation,
                 mms_values: Sequence[Rational],
                 certified_c: Rational) -> GuaranteeReport:
    """Per-agent value/mms ratios for an allocation, with the certified c.

    Raises InternalInvariantError if some agent with positive mms falls below
    the certified coefficient.
    """
    if alloc.n != inst.n or len(mms_values) != inst.n:
        raise MmscError("report arity mismatch")
    agents = []
    for u, b, q in zip(inst.agents, alloc.bundles, mms_values):
        v = bundle_value(u, b)
        agents.append(AgentReport(q, v, None if q == 0 else v / q))
    return GuaranteeReport(tuple(agents), Fraction(certified_c))


def arc_from_goods(goods: Sequence[int], m: int) -> Arc:
    """Convert a set of goods known to be contiguous on the cycle to an Arc."""
    goods_set = set(goods)
    if not goods_set:
        return EMPTY_ARC
    if len(goods_set) == m:
        return Arc(0, m)
    # The unique start is the good whose predecessor is outside the set.
    starts = [x for x in goods_set if (x - 1) % m not in goods_set]
    if len(starts) != 1:
        raise MalformedBundleError(f"goods {sorted(goods_set)} are not an arc")
    start = starts[0]
    arc = Arc(start, len(goods_set))
    if set(arc.goods(m)) != goods_set:
        raise MalformedBundleError(f"goods {sorted(goods_set)} are not an arc")
    return arc
