"""c-sufficient allocation constructors for cycles.

Implements the `allocate` protocol, the 1/2, psi, t/(2t-2), 3/4 (two and
three types) and 5/6 (three agents) guarantees, the jump / useful-sequence
machinery behind the three-type theorem, and the best-guarantee dispatcher.

Every constructor verifies its output exactly: the returned allocation is
checked to give each agent at least c times her maximin share.  Proof steps
that are claimed to be impossible are encoded as internal-invariant errors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from ._cycle_ops import (
    arc_goods_set,
    arc_intersection,
    arcs_from_goods,
    complete_arc_allocation,
    cut_edges,
    intersection_allocation,
    single_arc,
    two_bundles_allocation,
)
from ._matching import perfect_matching
from .exact_alloc import (
    allocate_cycle_fixed_types,
    allocate_cycle_m_lt_2n,
    allocate_one_deviant,
    allocate_three_agents_small,
    allocate_tree_with_targets,
    decide_cycle_m_eq_2n,
)
from .mms_core import mms_cycle, mms_path
from .model import (
    Allocation,
    AnchoredSplit,
    Arc,
    EMPTY_ARC,
    GuaranteeReport,
    Instance,
    InternalInvariantError,
    PreconditionError,
    Rational,
    Shape,
    Split,
    UnsupportedShapeError,
    UtilityFunction,
    build_report,
    bundle_value,
    reverse_arc,
    reverse_orientation,
)
from .regularize import TRIVIAL, pull_back, regularize

#: "Acceptable" in the three-type machinery: value at least 3/4 (exact).
ACCEPTABLE = Fraction(3, 4)


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass
class ProtocolState:
    """Snapshot of the Figure-2 `allocate` protocol."""

    s_agents: set            # agents with a c-strong (n-1)-split of P - Q
    r_agents: set            # the rest
    assigned: list           # per-agent (start, end) slice of the path
    next_pos: int            # first unallocated position on the path
    threshold: Rational


@dataclass(frozen=True)
class PsiPlan:
    """The edge-selection plan behind the psi-sufficiency theorem."""

    p: int
    h_bar: int
    h_under: int
    r: int
    edge_sequence: tuple[int, ...]    # n^2 boundary edges, clockwise scan
    removed_edges: tuple[int, ...]    # distinct physical edges removed
    q_arc: Arc                        # chosen prefix Q
    c: Rational                       # f(p)


@dataclass(frozen=True)
class AnchoredSplitPair:
    """Two anchored splits plus their jump table."""

    x: AnchoredSplit
    y: AnchoredSplit
    jumps: tuple[tuple[bool, bool], ...]  # (X_i is a jump, Y_i is a jump)


@dataclass(frozen=True)
class ChunkGrid:
    """Nine chunks of three aligned 3-splits, plus significant markers."""

    chunks: tuple[frozenset, ...]          # chunk k = 1..9 at index k-1
    a_sets: tuple[Arc, Arc, Arc]
    b_sets: tuple[Arc, Arc, Arc]
    c_sets: tuple[Arc, Arc, Arc]
    significant: tuple[int, int, int]      # index of the i-significant bundle


# ---------------------------------------------------------------------------
# Small shared helpers
# ---------------------------------------------------------------------------

def _require_cycle(inst: Instance) -> None:
    if inst.graph.shape is not Shape.CYCLE:
        raise UnsupportedShapeError("constructor requires a cycle")


def _sorted_type_groups(inst: Instance) -> list[list[int]]:
    """Agents grouped by distinct utility vector, largest group first.

    Declared type ids are ignored here on purpose: the type-count theorems
    only depend on how many distinct utilities occur, and two declared types
    may coincide.
    """
    by_util: dict = {}
    for i, u in enumerate(inst.agents):
        by_util.setdefault(u.values, []).append(i)
    return sorted(by_util.values(), key=lambda g: (-len(g), g[0]))


def _all_to_first(inst: Instance, provenance: str) -> Allocation:
    bundles = [EMPTY_ARC] * inst.n
    bundles[0] = Arc(0, inst.m)
    return Allocation(tuple(bundles), provenance=provenance)


def _mms_values(inst: Instance) -> list[Rational]:
    cache: dict = {}
    out = []
    for u in inst.agents:
        if u.values not in cache:
            cache[u.values] = mms_cycle(u, inst.n).value
        out.append(cache[u.values])
    return out


def _verify(inst: Instance, bundles: Sequence, c: Rational,
            provenance: str) -> Allocation:
    alloc = Allocation(tuple(bundles), provenance=provenance)
    build_report(inst, alloc, _mms_values(inst), c)
    return alloc


def _split_arcs(u: UtilityFunction, n: int, m: int) -> list[Arc]:
    """The bundles of an mms-split as arcs, clockwise by start."""
    arcs = [b for b in mms_cycle(u, n).split.bundles if not b.empty]
    return sorted(arcs, key=lambda a: a.start)


def _anchored(arcs: Sequence[Arc], m: int, anchor: int) -> AnchoredSplit:
    """Order the arcs of a cycle partition clockwise from the anchor."""
    first = next(i for i, a in enumerate(arcs)
                 if (anchor - a.start) % m < a.length)
    ordered = sorted(arcs, key=lambda a: (a.start - arcs[first].start) % m)
    k = ordered.index(arcs[first])
    ordered = ordered[k:] + ordered[:k]
    return AnchoredSplit(m, anchor, tuple(ordered))


def _arc_contains(inner: Arc, outer: Arc, m: int) -> bool:
    if inner.empty:
        return True
    if outer.empty:
        return False
    return arc_goods_set(inner, m) <= arc_goods_set(outer, m)


def _assign_arc_and_tree(reg: Instance, arc: Arc, owner: int) -> list[Arc]:
    """Assign `arc` to `owner`, tree-allocate the complementary path to the
    remaining agents, each at her own path mms."""
    m = reg.m
    start = (arc.start + arc.length) % m
    path_goods = [(start + i) % m for i in range(m - arc.length)]
    others = [i for i in range(reg.n) if i != owner]
    path_adj: list[list[int]] = [
        [j for j in (k - 1, k + 1) if 0 <= j < len(path_goods)]
        for k in range(len(path_goods))]
    utils, targets = [], []
    for i in others:
        u = UtilityFunction(tuple(reg.agents[i][g] for g in path_goods))
        utils.append(u)
        targets.append(mms_path(u, len(others)).value)
    parts = allocate_tree_with_targets(path_adj, utils, targets)
    bundles: list[Arc] = [EMPTY_ARC] * reg.n
    bundles[owner] = arc
    for i, part in zip(others, parts):
        if not part:
            continue
        idx = sorted(part)
        if idx != list(range(idx[0], idx[-1] + 1)):
            raise InternalInvariantError("path bundle is not an interval")
        bundles[i] = Arc(path_goods[idx[0]], len(idx))
    return bundles


def _singleton_escape(reg: Instance, c: Rational) -> Optional[list[Arc]]:
    """If a single good is worth >= c to someone, assign it and tree-allocate
    the rest at full mms."""
    for i in range(reg.n):
        for x in range(reg.m):
            if reg.agents[i][x] >= c:
                return _assign_arc_and_tree(reg, Arc(x, 1), i)
    return None


# ---------------------------------------------------------------------------
# The Figure-2 `allocate` protocol
# ---------------------------------------------------------------------------

def _greedy_c_parts(values: Sequence[Rational], c: Rational) -> int:
    count = 0
    acc = Fraction(0)
    for v in values:
        acc += v
        if acc >= c:
            count += 1
            acc = Fraction(0)
    return count


def allocate_protocol(values: Sequence[Sequence[Rational]], q_len: int,
                      c: Rational) -> tuple[list[Optional[tuple[int, int]]],
                                            set]:
    """Run the prefix-assignment protocol on a path.

    `values[i][j]` is agent i's value for the j-th good of the path; the
    prefix Q is the first `q_len` goods.  Returns per-agent half-open
    (start, end) slices (None = unassigned) and the initial set S.  The
    protocol invariant is asserted: every agent initially in S ends up
    assigned a bundle worth at least c to her.
    """
    n = len(values)
    if n < 2:
        raise PreconditionError("protocol requires at least two agents")
    length = len(values[0])
    if not 0 < q_len <= length:
        raise PreconditionError("Q must be a non-empty prefix of P")
    if not any(sum(v[:q_len], Fraction(0)) >= c for v in values):
        raise PreconditionError("Q must be worth >= c to some agent")
    s_set = {i for i in range(n)
             if _greedy_c_parts(values[i][q_len:], c) >= n - 1}
    r_set = set(range(n)) - s_set
    s0 = frozenset(s_set)
    assigned: list[Optional[tuple[int, int]]] = [None] * n
    pos = 0
    while s_set or r_set:
        ends: dict[int, int] = {}
        for i in s_set | r_set:
            acc = Fraction(0)
            for j in range(pos, length):
                acc += values[i][j]
                if acc >= c:
                    ends[i] = j + 1
                    break
        if not ends:
            break
        best = min(ends.values())
        takers = sorted(i for i, e in ends.items() if e == best)
        r_takers = [i for i in takers if i in r_set]
        agent = r_takers[0] if r_takers else takers[0]
        assigned[agent] = (pos, best)
        s_set.discard(agent)
        r_set.discard(agent)
        pos = best
    if any(i in s_set for i in s0):
        raise InternalInvariantError(
            "protocol invariant violated: an initial S-agent is unassigned")
    return assigned, set(s0)


def _protocol_on_cycle(reg: Instance, q_arc: Arc, c: Rational) -> list[Arc]:
    """Cut the cycle so q_arc is a prefix, run the protocol, convert the
    (asserted complete) assignment back to arcs; the trailing leftover is
    attached to the last assigned bundle."""
    m = reg.m
    order = [(q_arc.start + i) % m for i in range(m)]
    values = [[u[g] for g in order] for u in reg.agents]
    assigned, _ = allocate_protocol(values, q_arc.length, c)
    if any(seg is None for seg in assigned):
        raise InternalInvariantError("protocol left an agent unassigned")
    last = max(range(reg.n), key=lambda i: assigned[i][1])
    bundles = []
    for i, (j0, j1) in enumerate(assigned):
        if i == last:
            j1 = m
        bundles.append(Arc(order[j0], j1 - j0))
    return bundles


# ---------------------------------------------------------------------------
# 1/2-sufficient: cut one edge and allocate the path
# ---------------------------------------------------------------------------

def half_sufficient(inst: Instance) -> Allocation:
    """Delete edge (m-1, 0) and tree-allocate the path; min ratio >= 1/2."""
    _require_cycle(inst)
    n, m = inst.n, inst.m
    if n == 1:
        return _verify(inst, [Arc(0, m)], Fraction(1), "half_sufficient")
    path_adj: list[list[int]] = [
        [j for j in (k - 1, k + 1) if 0 <= j < m] for k in range(m)]
    targets = [mms_path(u, n).value for u in inst.agents]
    parts = allocate_tree_with_targets(path_adj, inst.agents, targets)
    bundles: list[Arc] = []
    for part in parts:
        if not part:
            bundles.append(EMPTY_ARC)
            continue
        idx = sorted(part)
        bundles.append(Arc(idx[0], len(idx)))
    return _verify(inst, bundles, Fraction(1, 2), "half_sufficient")


# ---------------------------------------------------------------------------
# psi-sufficient (general cycles)
# ---------------------------------------------------------------------------

def _f(n: int, d: int) -> Fraction:
    return min(Fraction(n, d), Fraction(n, -(n * n // -d) + n - 2))


def psi_plan(inst: Instance) -> PsiPlan:
    """Edge-selection plan for a *regular* instance (apply regularize first)."""
    _require_cycle(inst)
    n, m = inst.n, inst.m
    if n < 2:
        raise PreconditionError("psi_plan requires n >= 2")
    if any(u.total != n for u in inst.agents):
        raise PreconditionError("psi_plan requires a regular instance")
    best_d, best_f = n, _f(n, n)
    for d in range(n + 1, n * n):
        fd = _f(n, d)
        if fd > best_f:
            best_d, best_f = d, fd
    p, c = best_d, best_f
    h_bar = -(n * n // -p)
    h_under = n * n // p
    r = n * n - p * h_under
    # Boundary edges of all mms-splits, scanned clockwise from edge (m-1, 0);
    # edge e joins goods e and e+1 (mod m).
    split_cuts = [cut_edges(Split(tuple(_split_arcs(u, n, m))), m)
                  for u in inst.agents]
    seq: list[int] = []
    for e in [m - 1] + list(range(m - 1)):
        k = sum(1 for cuts in split_cuts if e in cuts)
        seq.extend([e] * k)
    if len(seq) != n * n:
        raise InternalInvariantError("expected n^2 boundary edges")
    removed_idx = [0] + [t * h_bar for t in range(1, r + 1)] + \
        [r * h_bar + t * h_under for t in range(1, p - r)]
    removed = sorted({seq[i] for i in removed_idx})
    parts = []
    for a, b in zip(removed, removed[1:] + [removed[0] + m]):
        length = (b - a) % m
        if length:
            parts.append(Arc((a + 1) % m, length))
    u_last = inst.agents[n - 1]
    q_arc = max(parts, key=lambda a: (bundle_value(u_last, a), -a.start))
    return PsiPlan(p, h_bar, h_under, r, tuple(seq), tuple(removed),
                   q_arc, c)


def psi_sufficient(inst: Instance) -> Allocation:
    """A c-sufficient allocation with c = f(p) >= psi = (sqrt(5)-1)/2."""
    _require_cycle(inst)
    if inst.n == 1:
        return _verify(inst, [Arc(0, inst.m)], Fraction(1), "psi_sufficient")
    reg = regularize(inst)
    if reg is TRIVIAL:
        return _verify(inst, _all_to_first(inst, "psi_sufficient").bundles,
                       Fraction(1), "psi_sufficient")
    reg_inst, cert = reg
    plan = psi_plan(reg_inst)
    bundles = _singleton_escape(reg_inst, plan.c)
    if bundles is None:
        bundles = _protocol_on_cycle(reg_inst, plan.q_arc, plan.c)
    alloc = Allocation(tuple(bundles), provenance="psi_sufficient")
    pull_back(alloc, cert, plan.c)
    return _verify(inst, bundles, plan.c, "psi_sufficient")


# ---------------------------------------------------------------------------
# t/(2t-2)-sufficient for t >= 4 types
# ---------------------------------------------------------------------------

def t_over_2t2_sufficient(inst: Instance) -> Allocation:
    _require_cycle(inst)
    groups = _sorted_type_groups(inst)
    t = len(groups)
    if t < 4:
        raise PreconditionError(
            "t/(2t-2) requires >= 4 types; use the dedicated 2/3-type ops")
    if len({inst.agents[g[0]].values for g in groups}) == 1:
        return allocate_one_deviant(inst)
    c_t = Fraction(t, 2 * t - 2)
    reg = regularize(inst)
    if reg is TRIVIAL:
        return _verify(inst, _all_to_first(inst, "t_over_2t2").bundles,
                       Fraction(1), "t_over_2t2_sufficient")
    reg_inst, cert = reg
    n, m = reg_inst.n, reg_inst.m
    u1 = reg_inst.agents[groups[0][0]]
    u2 = reg_inst.agents[groups[1][0]]
    bundles = _singleton_escape(reg_inst, c_t)
    if bundles is None:
        a_arcs = _split_arcs(u1, n, m)
        b_arcs = _split_arcs(u2, n, m)
        q_arc = None
        for a in a_arcs:
            for b in b_arcs:
                for piece in arc_intersection(a, b, m):
                    if any(bundle_value(u, piece) >= c_t
                           for u in reg_inst.agents):
                        q_arc = piece
                        break
                if q_arc:
                    break
            if q_arc:
                break
        if q_arc is None:
            # No acceptable intersection: the A-split itself is c_t-strong
            # for type 2, so it can serve as both Pi_1 and Pi_2 with Q = A_1.
            if any(bundle_value(u2, a) < c_t for a in a_arcs):
                raise InternalInvariantError(
                    "A-split must be c_t-strong for type 2")
            q_arc = a_arcs[0]
        bundles = _protocol_on_cycle(reg_inst, q_arc, c_t)
    alloc = Allocation(tuple(bundles), provenance="t_over_2t2_sufficient")
    pull_back(alloc, cert, c_t)
    return _verify(inst, bundles, c_t, "t_over_2t2_sufficient")


# ---------------------------------------------------------------------------
# 3/4-sufficient for two types
# ---------------------------------------------------------------------------

def three_quarters_two_types(inst: Instance) -> Allocation:
    _require_cycle(inst)
    groups = _sorted_type_groups(inst)
    if len(groups) > 2:
        raise PreconditionError("more than two types")
    if len(groups) == 1 or len(
            {inst.agents[g[0]].values for g in groups}) == 1:
        return allocate_one_deviant(inst)
    reg = regularize(inst)
    if reg is TRIVIAL:
        return _verify(inst, _all_to_first(inst, "3/4-two-types").bundles,
                       Fraction(1), "three_quarters_two_types")
    reg_inst, cert = reg
    n, m = reg_inst.n, reg_inst.m
    c = ACCEPTABLE
    g1, g2 = groups
    u1 = reg_inst.agents[g1[0]]
    u2 = reg_inst.agents[g2[0]]
    a_arcs = _split_arcs(u1, n, m)
    b_arcs = _split_arcs(u2, n, m)
    bundles: Optional[list[Arc]] = None
    for a in a_arcs:
        for b in b_arcs:
            for piece in arc_intersection(a, b, m):
                owner = next((i for i in range(n)
                              if bundle_value(reg_inst.agents[i], piece) >= c),
                             None)
                if owner is not None:
                    bundles = _assign_arc_and_tree(reg_inst, piece, owner)
                    break
            if bundles:
                break
        if bundles:
            break
    if bundles is None:
        acceptable = [i for i, a in enumerate(a_arcs)
                      if bundle_value(u2, a) >= c]
        if len(acceptable) < len(g2):
            raise InternalInvariantError(
                "fewer than n/2 A-sets acceptable to type 2")
        bundles = [EMPTY_ARC] * n
        taken = set()
        for agent, idx in zip(g2, acceptable):
            bundles[agent] = a_arcs[idx]
            taken.add(idx)
        rest = [i for i in range(n) if i not in taken]
        for agent, idx in zip(g1, rest):
            bundles[agent] = a_arcs[idx]
    alloc = Allocation(tuple(bundles), provenance="three_quarters_two_types")
    pull_back(alloc, cert, c)
    return _verify(inst, bundles, c, "three_quarters_two_types")


# ---------------------------------------------------------------------------
# Jump machinery (appendix)
# ---------------------------------------------------------------------------

def jump_table(x: AnchoredSplit, y: AnchoredSplit
               ) -> tuple[tuple[bool, bool], ...]:
    """(X_i is a jump to Y, Y_i is a jump to X) for each index i."""
    if x.m != y.m or x.anchor != y.anchor or len(x.arcs) != len(y.arcs):
        raise PreconditionError("anchored splits are not comparable")
    offs_x = [x.prefix_end_offset(i) for i in range(len(x.arcs))]
    offs_y = [y.prefix_end_offset(i) for i in range(len(y.arcs))]
    table = tuple((ox <= oy, oy <= ox) for ox, oy in zip(offs_x, offs_y))
    if any(not (a or b) for a, b in table):
        raise InternalInvariantError("jump dichotomy violated")
    return table


def useful_sequence_check(x: AnchoredSplit, y: AnchoredSplit,
                          z: Sequence[str]) -> bool:
    """True iff z (entries 'X'/'Y') is an XY-useful selection; when true the
    selected bundles are asserted pairwise disjoint."""
    n = len(x.arcs)
    if len(z) != n or any(s not in ("X", "Y") for s in z):
        raise PreconditionError("z must be a length-n 'X'/'Y' sequence")
    jumps = jump_table(x, y)
    for i in range(n):
        a, b = z[i], z[(i + 1) % n]
        if a == b:
            continue
        if a == "X" and jumps[i][0]:
            continue
        if a == "Y" and jumps[i][1]:
            continue
        return False
    goods: set = set()
    for i, s in enumerate(z):
        arc = x.arcs[i] if s == "X" else y.arcs[i]
        g = arc_goods_set(arc, x.m)
        if goods & g:
            raise InternalInvariantError(
                "useful sequence selected overlapping bundles")
        goods |= g
    return True


def proper_relative(x: Union[AnchoredSplit, Sequence[Arc]],
                    y: Union[AnchoredSplit, Sequence[Arc]],
                    m: Optional[int] = None
                    ) -> tuple[bool, Optional[int]]:
    """Containment-freeness of two splits; when proper, which of the two
    index-phase patterns holds (1: X_i <= Y_i u Y_{i+1}; 2: the shifted one).

    Accepts anchored splits (sharing an anchor) or plain clockwise arc lists
    with an explicit m.
    """
    if isinstance(x, AnchoredSplit):
        m = x.m
        xs, ys = list(x.arcs), list(y.arcs)
    else:
        assert m is not None
        xs, ys = list(x), list(y)
    for a in xs:
        for b in ys:
            if _arc_contains(a, b, m) or _arc_contains(b, a, m):
                return False, None
    n = len(xs)
    for phase in (1, 2):
        ok = True
        for i in range(n):
            j = i if phase == 1 else (i - 1) % n
            union = arc_goods_set(ys[j], m) | arc_goods_set(ys[(j + 1) % n], m)
            if not arc_goods_set(xs[i], m) <= union:
                ok = False
                break
        if ok:
            return True, phase
    return True, None


def every_second_acceptable(x: AnchoredSplit, y: AnchoredSplit,
                            y_util: UtilityFunction) -> list[int]:
    """For each consecutive pair (i, i+1) of X-bundles, the index of one
    acceptable (>= 3/4) to agent y.  Preconditions per the lemma."""
    ok, _ = proper_relative(x, y)
    if not ok:
        raise PreconditionError("splits are not proper relative to each other")
    m = x.m
    for a in x.arcs:
        for b in y.arcs:
            for piece in arc_intersection(a, b, m):
                if bundle_value(y_util, piece) >= ACCEPTABLE:
                    raise PreconditionError(
                        "an X-Y intersection is acceptable to y")
    n = len(x.arcs)
    vals = [bundle_value(y_util, a) for a in x.arcs]
    out = []
    for i in range(n):
        j = (i + 1) % n
        if vals[i] >= ACCEPTABLE:
            out.append(i)
        elif vals[j] >= ACCEPTABLE:
            out.append(j)
        else:
            raise InternalInvariantError(
                "every-second acceptability violated")
    return out


# ---------------------------------------------------------------------------
# 3/4-sufficient for three types (appendix machinery)
# ---------------------------------------------------------------------------

@dataclass
class _Ctx3:
    """Working state for the three-type theorem on a regular instance."""

    reg: Instance
    m: int
    n: int
    counts: tuple[int, int, int]          # n1 >= n2 >= n3 >= 1
    utils: tuple[UtilityFunction, ...]    # representative per role
    groups: tuple[list, ...]              # agent indices per role
    splits: tuple[list, ...]              # clockwise arc lists per role


def _make_ctx(reg: Instance, groups: Sequence[Sequence[int]]) -> _Ctx3:
    n, m = reg.n, reg.m
    utils = tuple(reg.agents[g[0]] for g in groups)
    splits = tuple(_split_arcs(u, n, m) for u in utils)
    return _Ctx3(reg, m, n, tuple(len(g) for g in groups), utils,
                 tuple(list(g) for g in groups), splits)


def _acc_pieces(ctx: _Ctx3, xs: Sequence[Arc], ys: Sequence[Arc],
                util: UtilityFunction) -> Optional[Arc]:
    """A connected piece of some X-Y intersection acceptable to util."""
    for a in xs:
        for b in ys:
            for piece in arc_intersection(a, b, ctx.m):
                if bundle_value(util, piece) >= ACCEPTABLE:
                    return piece
    return None


def _containment(ctx: _Ctx3, inner: Sequence[Arc],
                 outer: Sequence[Arc]) -> list[tuple[int, int]]:
    return [(i, j) for i, a in enumerate(inner) for j, b in enumerate(outer)
            if _arc_contains(a, b, ctx.m)]


def _pick_acceptable(arcs: Sequence[Arc], util: UtilityFunction,
                     count: int, m: int) -> Optional[tuple[list[int],
                                                           list[int]]]:
    """Greedily select `count` arcs acceptable to util; (picked, rest)."""
    picked, rest = [], []
    for i, a in enumerate(arcs):
        if len(picked) < count and bundle_value(util, a) >= ACCEPTABLE:
            picked.append(i)
        else:
            rest.append(i)
    if len(picked) < count:
        return None
    return picked, rest


def _assemble(ctx: _Ctx3, assigned: list[tuple[int, Arc]]) -> list[Arc]:
    """Complete disjoint assigned arcs to a full allocation (gaps attach to
    the clockwise-preceding assigned arc)."""
    pairs = {a: arc for a, arc in assigned}
    full = [(i, pairs.get(i, EMPTY_ARC)) for i in range(ctx.n)]
    return complete_arc_allocation(ctx.m, full, ctx.n)


def _try_z_allocation(ctx: _Ctx3, x_role: int, y_role: int, anchor: int,
                      z: Sequence[str],
                      x_pick: tuple[int, UtilityFunction, int],
                      y_pick: Optional[tuple[int, UtilityFunction, int]],
                      x_rest_role: int, y_rest_role: int,
                      extra: Optional[tuple[int, Arc]] = None
                      ) -> Optional[list[Arc]]:
    """Build an allocation from an XY-useful selection z.

    Among the X-labeled arcs, `x_pick = (count, util, role)` arcs acceptable
    to util go to that role; the remaining X-labeled arcs go to x_rest_role.
    Same for the Y side (y_pick may be None).  `extra` optionally assigns one
    more arc to a specific role.  Returns None if the selection is not useful
    or the acceptability picks cannot be made.
    """
    xa = _anchored(ctx.splits[x_role], ctx.m, anchor)
    ya = _anchored(ctx.splits[y_role], ctx.m, anchor)
    if not useful_sequence_check(xa, ya, z):
        return None
    x_idx = [i for i, s in enumerate(z) if s == "X"]
    y_idx = [i for i, s in enumerate(z) if s == "Y"]
    roster = {r: list(ctx.groups[r]) for r in range(3)}
    assigned: list[tuple[int, Arc]] = []
    if extra is not None:
        role, arc = extra
        if not roster[role]:
            return None
        assigned.append((roster[role].pop(0), arc))

    def place(indices, arcs_of, pick, rest_role):
        arcs = [arcs_of.arcs[i] for i in indices]
        if pick is not None:
            count, util, role = pick
            sel = _pick_acceptable(arcs, util, count, ctx.m)
            if sel is None:
                return False
            picked, rest = sel
        else:
            picked, rest = [], list(range(len(arcs)))
        for i in picked:
            if not roster[pick[2]]:
                return False
            assigned.append((roster[pick[2]].pop(0), arcs[i]))
        for i in rest:
            if not roster[rest_role]:
                return False
            assigned.append((roster[rest_role].pop(0), arcs[i]))
        return True

    if not place(x_idx, xa, x_pick, x_rest_role):
        return None
    if not place(y_idx, ya, y_pick, y_rest_role):
        return None
    if any(roster[r] for r in range(3)):
        return None
    try:
        return _assemble(ctx, assigned)
    except InternalInvariantError:
        return None


def _z_pattern(n: int, c_positions: Sequence[int]) -> list[str]:
    """'Y' at the given 1-based positions, 'X' elsewhere."""
    z = ["X"] * n
    for p in c_positions:
        z[(p - 1) % n] = "Y"
    return z


def _case2_like(ctx: _Ctx3, x_role: int, n_keep: int,
                x_pick_role: int, x_pick_util: UtilityFunction,
                x_pick_count: int, x_rest_role: int) -> Optional[list[Arc]]:
    """Case 2 jump construction: some C-set contained in an X-set (X = the
    role-x_role split).

    Builds an XC-useful sequence with n_keep C-positions (all C-labeled arcs
    go to role 3); among the X-labeled arcs, x_pick_count acceptable to
    x_pick_util go to x_pick_role, the rest to x_rest_role.
    """
    n, m = ctx.n, ctx.m
    y_role = 2
    for ci, _xi in _containment(ctx, ctx.splits[y_role], ctx.splits[x_role]):
        anchor = ctx.splits[y_role][ci].start
        xa = _anchored(ctx.splits[x_role], m, anchor)
        ya = _anchored(ctx.splits[y_role], m, anchor)
        jumps = jump_table(xa, ya)
        c_jump = [b for _, b in jumps]
        if not c_jump[0]:
            continue
        cands: list[list[str]] = []
        if c_jump[n_keep - 1]:
            cands.append(_z_pattern(n, range(1, n_keep + 1)))
        else:
            ks = [k for k in range(1, n_keep) if c_jump[k - 1]]
            if ks:
                k = max(ks)
                ls = [j for j in range(n_keep + 1, n + 1) if c_jump[j - 1]]
                ell = min(ls) if ls else n
                cands.append(_z_pattern(
                    n, list(range(1, k + 1)) +
                    list(range(ell - (n_keep - k) + 1, ell + 1))))
        for z in cands:
            res = _try_z_allocation(
                ctx, x_role, y_role, anchor, z,
                (x_pick_count, x_pick_util, x_pick_role), None,
                x_rest_role, 2)
            if res is not None:
                return res
    return None


def _case7(ctx: _Ctx3) -> Optional[list[Arc]]:
    """Case 7: some C-set inside a B-set, n1 > n2."""
    n, m = ctx.n, ctx.m
    n1, n2, n3 = ctx.counts
    u1 = ctx.utils[0]
    for ci, bi in _containment(ctx, ctx.splits[2], ctx.splits[1]):
        anchor = ctx.splits[2][ci].start
        ba = _anchored(ctx.splits[1], m, anchor)
        ca = _anchored(ctx.splits[2], m, anchor)
        jumps = jump_table(ba, ca)
        c_jump = [b for _, b in jumps]
        if not c_jump[0]:
            continue
        plans: list[tuple[list[str], int, int]] = []  # (z, c_to_i1, b_to_i1)
        if 2 * n3 <= n and c_jump[2 * n3 - 1]:
            plans.append((_z_pattern(n, range(1, 2 * n3 + 1)),
                          n3, n1 - n3))
        elif c_jump[2 * n3 - 2]:
            plans.append((_z_pattern(n, range(1, 2 * n3)),
                          n3 - 1, n1 - n3 + 1))
        else:
            ks = [k for k in range(1, 2 * n3 - 1) if c_jump[k - 1]]
            if ks:
                k = max(ks)
                ls = [j for j in range(2 * n3 + 1, n + 1) if c_jump[j - 1]]
                ell = min(ls) if ls else n
                if k % 2 == 0:
                    z = _z_pattern(
                        n, list(range(1, k + 1)) +
                        list(range(ell - (2 * n3 - k) + 1, ell + 1)))
                    plans.append((z, n3, n1 - n3))
                else:
                    z = _z_pattern(
                        n, list(range(1, k + 1)) +
                        list(range(ell - (2 * n3 - k) + 2, ell + 1)))
                    plans.append((z, n3 - 1, n1 - n3 + 1))
        for z, c_to_i1, b_to_i1 in plans:
            res = _try_z_allocation(
                ctx, 1, 2, anchor, z,
                (b_to_i1, u1, 0), (c_to_i1, u1, 0), 1, 2)
            if res is not None:
                return res
    return None


def _interval_alloc(ctx: _Ctx3,
                    assigned: list[tuple[int, Arc]]) -> Optional[list[Arc]]:
    """Verify disjointness/acceptability implicitly via assembly + report."""
    try:
        return _assemble(ctx, assigned)
    except InternalInvariantError:
        return None


def _roster(ctx: _Ctx3) -> dict[int, list]:
    return {r: list(ctx.groups[r]) for r in range(3)}


def _case456_like(ctx: _Ctx3, x_role: int, y_role: int,
                  pick_util: UtilityFunction, variant: str
                  ) -> Optional[list[Arc]]:
    """Interval constructions of Cases 4, 6, 8 (first form only; the mirror
    form is reached by re-running the whole theorem on the reversed cycle).

    variant: 'case4' (A/C, piece to i3), 'case6' (A/C, piece to i1, n1>n2),
    'case8' (B/C, piece to i3).
    """
    n, m = ctx.n, ctx.m
    n1, n2, n3 = ctx.counts
    xs = ctx.splits[x_role]
    cs = ctx.splits[2]
    ok, _phase = proper_relative(xs, cs, m)
    if not ok:
        return None
    # Align labels so that X_i starts inside C_i (then X_i <= C_i u C_{i+1}).
    xs = sorted(xs, key=lambda a: a.start)
    cs_sorted = sorted(cs, key=lambda a: a.start)

    def c_index_of(x_arc: Arc) -> int:
        return next(j for j, c in enumerate(cs_sorted)
                    if (x_arc.start - c.start) % m < c.length)

    for i0 in range(n):
        # Rotate so the acceptable intersection is X_1 n C_1.
        x_list = xs[i0:] + xs[:i0]
        j0 = c_index_of(x_list[0])
        c_list = cs_sorted[j0:] + cs_sorted[:j0]
        if any(not arc_goods_set(x_list[i], m) <=
               (arc_goods_set(c_list[i], m) |
                arc_goods_set(c_list[(i + 1) % n], m)) for i in range(n)):
            continue
        pieces = arc_intersection(x_list[0], c_list[0], m)
        piece = next((p for p in pieces
                      if bundle_value(pick_util, p) >= ACCEPTABLE), None)
        if piece is None:
            continue
        roster = _roster(ctx)
        assigned: list[tuple[int, Arc]] = []
        if variant == "case4":
            assigned.append((roster[2].pop(0), piece))
            for c_arc in c_list[1:n3]:
                assigned.append((roster[2].pop(0), c_arc))
            tail = x_list[n3:]
        elif variant == "case6":
            assigned.append((roster[0].pop(0), piece))
            for c_arc in c_list[1:n3 + 1]:
                assigned.append((roster[2].pop(0), c_arc))
            tail = x_list[n3 + 1:]
        else:  # case8 (x_role == 1)
            assigned.append((roster[2].pop(0), piece))
            if n1 > n2:
                span = c_list[1:2 * n3 - 1]
                sel = _pick_acceptable(span, ctx.utils[0], n3 - 1, m)
                if sel is None:
                    continue
                picked, rest = sel
                for i in picked:
                    assigned.append((roster[0].pop(0), span[i]))
                for i in rest:
                    assigned.append((roster[2].pop(0), span[i]))
                tail = x_list[2 * n3 - 1:]
            else:
                for c_arc in c_list[1:n3]:
                    assigned.append((roster[2].pop(0), c_arc))
                tail = x_list[n3:]
        if variant == "case8":
            # tail goes to i1/i2: pick i1-acceptable first.
            sel = _pick_acceptable(tail, ctx.utils[0], len(roster[0]), m)
            if sel is None:
                continue
            picked, rest = sel
            if len(rest) != len(roster[1]):
                continue
            for i in picked:
                assigned.append((roster[0].pop(0), tail[i]))
            for i in rest:
                assigned.append((roster[1].pop(0), tail[i]))
        else:
            sel = _pick_acceptable(tail, ctx.utils[1], n2, m)
            if sel is None:
                continue
            picked, rest = sel
            if len(rest) != len(roster[0]):
                continue
            for i in picked:
                assigned.append((roster[1].pop(0), tail[i]))
            for i in rest:
                assigned.append((roster[0].pop(0), tail[i]))
        if any(roster[r] for r in range(3)):
            continue
        res = _interval_alloc(ctx, assigned)
        if res is not None:
            return res
    return None


def _case5(ctx: _Ctx3) -> Optional[list[Arc]]:
    """Case 5: n1 >= floor(n/2); allocate the A-split outright."""
    n, m = ctx.n, ctx.m
    n1, n2, n3 = ctx.counts
    a = ctx.splits[0]
    u2, u3 = ctx.utils[1], ctx.utils[2]
    for t in range(n):
        if bundle_value(u3, a[t]) < ACCEPTABLE:
            continue
        order = a[t + 1:] + a[:t]  # A_1..A_{n-1} after rotating t to A_n
        sel2 = _pick_acceptable(order[:2 * n2], u2, n2, m)
        if sel2 is None:
            continue
        picked2, rest_head = sel2
        tail = order[2 * n2:]
        sel3 = _pick_acceptable(tail, u3, n3 - 1, m)
        if sel3 is None:
            continue
        picked3, rest_tail = sel3
        roster = _roster(ctx)
        assigned = [(roster[2].pop(0), a[t])]
        for i in picked2:
            assigned.append((roster[1].pop(0), order[:2 * n2][i]))
        for i in picked3:
            assigned.append((roster[2].pop(0), tail[i]))
        leftovers = [order[:2 * n2][i] for i in rest_head] + \
            [tail[i] for i in rest_tail]
        for arc in leftovers:
            assigned.append((roster[0].pop(0), arc))
        if any(roster[r] for r in range(3)):
            continue
        res = _interval_alloc(ctx, assigned)
        if res is not None:
            return res
    return None


def _case9(ctx: _Ctx3) -> Optional[list[Arc]]:
    """Residual case: every A-set is acceptable to type i3."""
    n, m = ctx.n, ctx.m
    n1, n2, n3 = ctx.counts
    a = ctx.splits[0]
    u2, u3 = ctx.utils[1], ctx.utils[2]
    if any(bundle_value(u3, arc) < ACCEPTABLE for arc in a):
        return None
    sel = _pick_acceptable(a, u2, n2, m)
    if sel is None:
        return None
    picked, rest = sel
    roster = _roster(ctx)
    assigned = [(roster[1].pop(0), a[i]) for i in picked]
    for i in rest:
        role = 0 if roster[0] else 2
        assigned.append((roster[role].pop(0), a[i]))
    return _interval_alloc(ctx, assigned)


def _lemma_n1_eq_n2(ctx: _Ctx3, which: str) -> Optional[list[Arc]]:
    """The n1 = n2 lemma; `which` says whether the contained C-set sits in
    an A-set ('A') or a B-set ('B'); in the latter case the roles of types
    i1 and i2 are swapped (the hypotheses are symmetric in them)."""
    n, m = ctx.n, ctx.m
    n1, n2, n3 = ctx.counts
    if which == "A":
        xs, bs = ctx.splits[0], ctx.splits[1]
        ux, ub = ctx.utils[0], ctx.utils[1]
        gx, gb = ctx.groups[0], ctx.groups[1]
    else:
        xs, bs = ctx.splits[1], ctx.splits[0]
        ux, ub = ctx.utils[1], ctx.utils[0]
        gx, gb = ctx.groups[1], ctx.groups[0]
    cs = ctx.splits[2]
    u3 = ctx.utils[2]
    g3 = ctx.groups[2]

    def local_ctx() -> _Ctx3:
        return _Ctx3(ctx.reg, m, n, (n1, n2, n3), (ux, ub, u3),
                     (list(gx), list(gb), list(g3)), (xs, bs, cs))

    lctx = local_ctx()
    containments = _containment(lctx, cs, xs)
    for ci, xi in containments:
        c_arc = cs[ci]
        # Anchor inside C_k n B_j n A_i where B_j is the earlier B-set
        # meeting A_i; any good of C_k n B_j works.
        anchors = []
        for b_arc in bs:
            common = arc_goods_set(c_arc, m) & arc_goods_set(b_arc, m)
            if common:
                anchors.append(min(common, key=lambda g:
                                   (g - c_arc.start) % m))
        for anchor in anchors:
            xa = _anchored(xs, m, anchor)
            ca = _anchored(cs, m, anchor)
            if not _arc_contains(ca.arcs[0], xa.arcs[0], m):
                continue
            jumps = jump_table(xa, ca)
            a_jump = [a for a, _ in jumps]
            c_jump = [b for _, b in jumps]
            plans: list[tuple[list[str], int]] = []  # (z, c_acc_to_i2)
            if all(a_jump):
                pos_c = [1] + list(range(2 * n1 + 2, n + 1))
                plans.append((_z_pattern(n, pos_c), 0))
            if any(a_jump[i] and a_jump[(i + 1) % n] for i in range(n)):
                if a_jump[n - 2] and a_jump[n - 1] and not a_jump[0]:
                    if c_jump[n3 - 1]:
                        plans.append((_z_pattern(n, range(1, n3 + 1)), 0))
                    elif n3 >= 2 and c_jump[n3 - 2]:
                        plans.append((_z_pattern(
                            n, [n] + list(range(1, n3))), 0))
                    elif n3 >= 3:
                        ks = [k for k in range(1, n3 - 1) if c_jump[k - 1]]
                        if ks:
                            k = max(ks)
                            ls = [j for j in range(n3 + 1, n + 1)
                                  if c_jump[j - 1]]
                            ell = min(ls) if ls else n
                            if (ell - n) % 2 == 0:
                                plans.append((_z_pattern(
                                    n, list(range(1, k + 1)) +
                                    list(range(ell - (n3 - k) + 1, ell + 1))),
                                    0))
                            else:
                                ls2 = [j for j in range(n3 + 1, n)
                                       if c_jump[j - 1]]
                                ell2 = min(ls2) if ls2 else n - 1
                                plans.append((_z_pattern(
                                    n, [n] + list(range(1, k + 1)) +
                                    list(range(ell2 - (n3 - k) + 2,
                                               ell2 + 1))), 0))
            # Case 3 of the lemma: alternating containments; the j in {0,1}
            # construction with C_{n3+j} a jump.
            for j in (0, 1):
                if n3 + j <= n and c_jump[(n3 + j - 1) % n]:
                    plans.append((_z_pattern(n, range(1, n3 + j + 1)), j))
            for z, c_to_i2 in plans:
                lc = local_ctx()
                res = _try_z_allocation(
                    lc, 0, 2, anchor, z,
                    (n1 - 0, ub, 1) if c_to_i2 == 0 else (n2 - c_to_i2, ub, 1),
                    (c_to_i2, ub, 1) if c_to_i2 else None,
                    0, 2)
                if res is not None:
                    return res
        # Lemma Case 3, acceptable B n C subcases (explicit intervals).
        res = _lemma_case3_bc(lctx, ci, xi)
        if res is not None:
            return res
    return None


def _lemma_case3_bc(lctx: _Ctx3, ci: int, xi: int) -> Optional[list[Arc]]:
    """n1 = n2 lemma, Case 3: some B n C piece acceptable to type i2."""
    n, m = lctx.n, lctx.m
    n1, n2, n3 = lctx.counts
    xs, bs, cs = lctx.splits
    ux, ub, u3 = lctx.utils
    bs_sorted = sorted(bs, key=lambda a: a.start)
    cs_sorted = sorted(cs, key=lambda a: a.start)

    def rot(lst, i):
        return lst[i:] + lst[:i]

    for bi in range(n):
        for cj in range(n):
            pieces = arc_intersection(bs_sorted[bi], cs_sorted[cj], m)
            piece = next((p for p in pieces
                          if bundle_value(ub, p) >= ACCEPTABLE), None)
            if piece is None:
                continue
            for direction in (-1, 1):
                # direction -1: the B_i n C_{i-1} form (C-run goes forward);
                # direction 1: the B_i n C_i form (C-run goes backward).
                if direction == -1:
                    c_run = [cs_sorted[(cj + 1 + t) % n] for t in range(n3 + 1)]
                    b_run = [bs_sorted[(bi - 1 - t) % n]
                             for t in range(2 * n1 - 2)]
                else:
                    c_run = [cs_sorted[(cj - 1 - t) % n] for t in range(n3 + 1)]
                    b_run = [bs_sorted[(bi + 1 + t) % n]
                             for t in range(2 * n1 - 2)]
                holder = next((k for k in (0, 1) if any(
                    _arc_contains(a_arc, c_run[k], m) for a_arc in xs)), None)
                if holder is None:
                    continue
                roster = _roster(lctx)
                assigned = [(roster[0].pop(0), c_run[holder])]
                for k in range(n3 + 1):
                    if k != holder:
                        assigned.append((roster[2].pop(0), c_run[k]))
                sel = _pick_acceptable(b_run, ux, n1 - 1, m)
                if sel is None:
                    continue
                picked, rest = sel
                for i in picked:
                    assigned.append((roster[0].pop(0), b_run[i]))
                assigned.append((roster[1].pop(0), piece))
                for i in rest:
                    assigned.append((roster[1].pop(0), b_run[i]))
                if any(roster[r] for r in range(3)):
                    continue
                res = _interval_alloc(lctx, assigned)
                if res is not None:
                    return res
    return None


def _three_types_core(reg: Instance, groups: Sequence[Sequence[int]]
                      ) -> Optional[list[Arc]]:
    """One orientation pass of the three-type theorem; None = needs mirror."""
    ctx = _make_ctx(reg, groups)
    n, m = ctx.n, ctx.m
    n1, n2, n3 = ctx.counts
    c = ACCEPTABLE

    # Case 1: some A n B piece acceptable to someone -> protocol lemma.
    piece = None
    for a in ctx.splits[0]:
        for b in ctx.splits[1]:
            for p in arc_intersection(a, b, m):
                if any(bundle_value(u, p) >= c for u in reg.agents):
                    piece = p
                    break
            if piece:
                break
        if piece:
            break
    if piece is not None:
        bundles = _singleton_escape(reg, c)
        if bundles is None:
            bundles = _protocol_on_cycle(reg, piece, c)
        return bundles

    # Case 2: some C-set inside an A-set.
    if _containment(ctx, ctx.splits[2], ctx.splits[0]):
        if n1 == n2:
            res = _lemma_n1_eq_n2(ctx, "A")
            if res is not None:
                return res
        else:
            res = _case2_like(ctx, 0, n3, 1, ctx.utils[1], n2, 0)
            if res is not None:
                return res
        return None  # mirror may succeed

    # Case 3: some A-set inside a C-set -- provably impossible here.
    if _containment(ctx, ctx.splits[0], ctx.splits[2]):
        raise InternalInvariantError(
            "Case 3 contradiction: A-set inside a C-set without the reverse")

    # Case 4: some A n C piece acceptable to type i3.
    if _acc_pieces(ctx, ctx.splits[0], ctx.splits[2],
                   ctx.utils[2]) is not None:
        res = _case456_like(ctx, 0, 2, ctx.utils[2], "case4")
        if res is not None:
            return res
        return None

    # Case 5: n1 >= floor(n/2).
    if n1 >= n // 2:
        res = _case5(ctx)
        if res is not None:
            return res
        return None

    # Case 6: some A n C piece acceptable to type i1 and n1 > n2.
    if n1 > n2 and _acc_pieces(ctx, ctx.splits[0], ctx.splits[2],
                               ctx.utils[0]) is not None:
        res = _case456_like(ctx, 0, 2, ctx.utils[0], "case6")
        if res is not None:
            return res
        return None

    # Case 7: some C-set inside a B-set.
    if _containment(ctx, ctx.splits[2], ctx.splits[1]):
        if n1 == n2:
            res = _lemma_n1_eq_n2(ctx, "B")
        else:
            res = _case7(ctx)
        if res is not None:
            return res
        return None

    # Case 8: some B n C piece acceptable to type i3.
    if _acc_pieces(ctx, ctx.splits[1], ctx.splits[2],
                   ctx.utils[2]) is not None:
        res = _case456_like(ctx, 1, 2, ctx.utils[2], "case8")
        if res is not None:
            return res
        return None

    # Case 9: residual.
    return _case9(ctx)


def three_quarters_three_types(inst: Instance) -> Allocation:
    _require_cycle(inst)
    groups = _sorted_type_groups(inst)
    if len(groups) > 3:
        raise PreconditionError("more than three types")
    if len(groups) <= 2 or len(
            {inst.agents[g[0]].values for g in groups}) <= 2:
        return three_quarters_two_types(inst)
    reg = regularize(inst)
    if reg is TRIVIAL:
        return _verify(inst, _all_to_first(inst, "3/4-three-types").bundles,
                       Fraction(1), "three_quarters_three_types")
    reg_inst, cert = reg
    bundles = _three_types_core(reg_inst, groups)
    if bundles is None:
        mirrored = reverse_orientation(reg_inst)
        rev = _three_types_core(mirrored, groups)
        if rev is None:
            raise InternalInvariantError(
                "three-type theorem: no case produced an allocation")
        bundles = [reverse_arc(a, inst.m) for a in rev]
    alloc = Allocation(tuple(bundles),
                       provenance="three_quarters_three_types")
    pull_back(alloc, cert, ACCEPTABLE)
    return _verify(inst, bundles, ACCEPTABLE, "three_quarters_three_types")


# ---------------------------------------------------------------------------
# 5/6-sufficient for three agents
# ---------------------------------------------------------------------------

_CHUNK_A = {1: 1, 2: 2, 3: 2, 4: 2, 5: 3, 6: 3, 7: 3, 8: 1, 9: 1}
_CHUNK_B = {1: 1, 2: 1, 3: 2, 4: 2, 5: 2, 6: 3, 7: 3, 8: 3, 9: 1}
_CHUNK_C = {1: 1, 2: 1, 3: 1, 4: 2, 5: 2, 6: 2, 7: 3, 8: 3, 9: 3}


def _chunk_goods(sets_a, sets_b, sets_c, k: int, m: int) -> frozenset:
    return (arc_goods_set(sets_a[_CHUNK_A[k] - 1], m) &
            arc_goods_set(sets_b[_CHUNK_B[k] - 1], m) &
            arc_goods_set(sets_c[_CHUNK_C[k] - 1], m))


def _build_chunk_grid(splits: Sequence[Sequence[Arc]], m: int
                      ) -> Optional[tuple[list[Arc], list[Arc], list[Arc],
                                          list[frozenset]]]:
    """Relabel the three 3-splits so the nine chunks partition the cycle
    into consecutive (possibly empty) connected pieces."""
    sa = sorted(splits[0], key=lambda a: a.start)
    for rot_a in range(3):
        a_sets = sa[rot_a:] + sa[:rot_a]
        for rot_b in range(3):
            sb = sorted(splits[1], key=lambda a: a.start)
            b_sets = sb[rot_b:] + sb[:rot_b]
            for rot_c in range(3):
                sc = sorted(splits[2], key=lambda a: a.start)
                c_sets = sc[rot_c:] + sc[:rot_c]
                chunks = [_chunk_goods(a_sets, b_sets, c_sets, k, m)
                          for k in range(1, 10)]
                if sum(len(ch) for ch in chunks) != m:
                    continue
                if any(len(arcs_from_goods(ch, m)) > 1 for ch in chunks):
                    continue
                return a_sets, b_sets, c_sets, chunks
    return None


def _five_sixths_escapes(reg: Instance, splits, m) -> Optional[list[Arc]]:
    """Containment lemma (c=1), two-bundle lemma, and the distinct-bundle
    matching escape."""
    # Bundle of split i contained in a bundle of split j -> c = 1 lemma.
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            for inner in splits[i]:
                for outer in splits[j]:
                    if _arc_contains(inner, outer, m):
                        return intersection_allocation(
                            m, reg.agents, inner, i, j,
                            Split(tuple(splits[j])), Fraction(1))
    # Two bundles of split i worth >= 1 to agent j -> distribute split i.
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            worthy = [a for a in splits[i]
                      if bundle_value(reg.agents[j], a) >= 1]
            if len(worthy) >= 2:
                return two_bundles_allocation(
                    m, reg.agents, i, j, Split(tuple(splits[i])), Fraction(1))
    # Distinct >= 1 bundles of split k for the two other agents -> matching.
    for k in range(3):
        others = [i for i in range(3) if i != k]
        adj = []
        for agent in range(3):
            if agent == k:
                adj.append([0, 1, 2])
            else:
                adj.append([b for b in range(3)
                            if bundle_value(reg.agents[agent],
                                            splits[k][b]) >= 1])
        match = perfect_matching(3, adj)
        if match is not None and len(
                {match[o] for o in others} | {match[k]}) == 3:
            # Ensure both others got >= 1 bundles (k's own bundle is worth 1).
            if all(bundle_value(reg.agents[o], splits[k][match[o]]) >= 1
                   for o in others):
                return [splits[k][match[agent]] for agent in range(3)]
    return None


def five_sixths_three_agents(inst: Instance) -> Allocation:
    _require_cycle(inst)
    if inst.n != 3:
        raise PreconditionError("five_sixths requires exactly three agents")
    c = Fraction(5, 6)
    reg = regularize(inst)
    if reg is TRIVIAL:
        return _verify(inst, _all_to_first(inst, "5/6").bundles,
                       Fraction(1), "five_sixths_three_agents")
    reg_inst, cert = reg
    m = inst.m
    base_splits = [_split_arcs(u, 3, m) for u in reg_inst.agents]
    bundles = _five_sixths_escapes(reg_inst, base_splits, m)
    if bundles is None:
        bundles = _five_sixths_cases(reg_inst, base_splits, m, c)
    if bundles is None:
        raise InternalInvariantError("5/6 theorem: no case applied")
    alloc = Allocation(tuple(bundles), provenance="five_sixths_three_agents")
    pull_back(alloc, cert, c)
    return _verify(inst, bundles, c, "five_sixths_three_agents")


def _five_sixths_cases(reg: Instance, base_splits, m: int,
                       c: Rational) -> Optional[list[Arc]]:
    """Chunk-grid Cases 1 and 2, over agent-role permutations and both
    orientations."""
    for reverse in (False, True):
        if reverse:
            work = reverse_orientation(reg)
            splits0 = [[reverse_arc(a, m) for a in s] for s in base_splits]
        else:
            work = reg
            splits0 = base_splits
        for perm in itertools.permutations(range(3)):
            # perm[r] = agent playing role r (splits A, B, C).
            utils = [work.agents[perm[r]] for r in range(3)]
            splits = [splits0[perm[r]] for r in range(3)]
            grid = _build_chunk_grid(splits, m)
            if grid is None:
                continue
            a_sets, b_sets, c_sets, chunks = grid
            res = _five_sixths_with_grid(work, utils, a_sets, b_sets, c_sets,
                                         chunks, m, c)
            if res is None:
                continue
            # Map role bundles back to agents, undoing the reversal.
            bundles = [EMPTY_ARC] * 3
            for r in range(3):
                arc = res[r]
                bundles[perm[r]] = reverse_arc(arc, m) if reverse else arc
            return bundles
    return None


def _five_sixths_with_grid(work, utils, a_sets, b_sets, c_sets, chunks, m,
                           c) -> Optional[list]:
    """Cases 1/2 on a fixed grid; returns per-ROLE bundles or None.

    Role bundles may be sets of goods; the caller converts as needed.  Only
    the three constructed bundles are returned; leftovers are attached by
    complete_arc_allocation-style extension before returning.
    """
    u3 = utils[2]

    def sig(split_idx, sets):
        others = [u for i, u in enumerate(utils) if i != split_idx]
        worthy = [i for i, s in enumerate(sets)
                  if all(bundle_value(u, s) >= 1 for u in others)]
        return worthy[0] if len(worthy) == 1 else None

    s1, s2 = sig(0, a_sets), sig(1, b_sets)
    if s1 is None or s2 is None:
        return None
    inter = arc_goods_set(a_sets[s1], m) & arc_goods_set(b_sets[s2], m)
    n_chunks = sum(1 for k in range(1, 10)
                   if chunks[k - 1] and chunks[k - 1] <= inter)
    if inter and n_chunks < 2 and len(inter) > 0:
        return None  # one-chunk intersection: try another permutation
    # Bring the significant bundles to the canonical positions by rotating
    # all three labels simultaneously (chunk pattern is rotation-invariant).
    for rot in range(3):
        aa = a_sets[rot:] + a_sets[:rot]
        bb = b_sets[rot:] + b_sets[:rot]
        cc = c_sets[rot:] + c_sets[:rot]
        ch = chunks[3 * rot:] + chunks[:3 * rot]
        sa, sb = (s1 - rot) % 3, (s2 - rot) % 3
        if not inter and sa == 0 and sb == 1:
            return _five_sixths_case1(work, utils, aa, bb, cc, ch, m, c)
        if inter and sa == 0 and sb == 0:
            return _five_sixths_case2(work, utils, aa, bb, cc, ch, m, c)
    return None


def _complete_roles(assigned: list, m: int) -> list:
    """Extend three disjoint role bundles (goods sets) to cover the cycle."""
    arcs = [(r, single_arc(goods, m)) for r, goods in assigned]
    return complete_arc_allocation(m, arcs, 3)


def _five_sixths_case1(work, utils, a_sets, b_sets, c_sets, chunks, m, c):
    """Significant bundles A_1 and B_2 disjoint."""
    u3 = utils[2]
    checks = [
        (a_sets[1], 0, "two_b"), (a_sets[2], 0, "two_b"),
        (None, 0, "inter_a"),
        (b_sets[0], 1, "two_b"), (b_sets[2], 1, "two_b"),
        (None, 1, "inter_b"),
    ]
    for obj, role, kind in checks:
        if kind == "two_b":
            if bundle_value(u3, obj) >= c:
                return two_bundles_allocation(
                    m, utils, role, 2,
                    Split(tuple(a_sets if role == 0 else b_sets)), c)
        elif kind == "inter_a":
            goods = arc_goods_set(a_sets[0], m) & arc_goods_set(c_sets[2], m)
            for piece in arcs_from_goods(goods, m):
                if bundle_value(u3, piece) >= c:
                    return intersection_allocation(
                        m, utils, piece, 2, 0, Split(tuple(a_sets)), c)
        else:
            goods = arc_goods_set(b_sets[1], m) & arc_goods_set(c_sets[1], m)
            for piece in arcs_from_goods(goods, m):
                if bundle_value(u3, piece) >= c:
                    return intersection_allocation(
                        m, utils, piece, 2, 1, Split(tuple(b_sets)), c)
    raise InternalInvariantError(
        "5/6 Case 1: proportionality contradiction reached")


def _five_sixths_case2(work, utils, a_sets, b_sets, c_sets, chunks, m, c):
    """Significant bundles A_1 and B_1 intersect on two chunks."""
    u3 = utils[2]
    for obj, role in ((a_sets[1], 0), (a_sets[2], 0)):
        if bundle_value(u3, obj) >= c:
            return two_bundles_allocation(m, utils, role, 2,
                                          Split(tuple(a_sets)), c)
    goods = arc_goods_set(a_sets[0], m) & arc_goods_set(c_sets[2], m)
    for piece in arcs_from_goods(goods, m):
        if bundle_value(u3, piece) >= c:
            return intersection_allocation(m, utils, piece, 2, 0,
                                           Split(tuple(a_sets)), c)
    for obj in (b_sets[1], b_sets[2]):
        if bundle_value(u3, obj) >= c:
            return two_bundles_allocation(m, utils, 1, 2,
                                          Split(tuple(b_sets)), c)
    goods = arc_goods_set(b_sets[0], m) & arc_goods_set(c_sets[0], m)
    for piece in arcs_from_goods(goods, m):
        if bundle_value(u3, piece) >= c:
            return intersection_allocation(m, utils, piece, 2, 1,
                                           Split(tuple(b_sets)), c)
    # Direct assignment: A_2 -> role 1, B_3 u (A_3 n B_2 n C_2) -> role 2,
    # A_1 n B_1 -> role 3.
    b2_bundle = (arc_goods_set(b_sets[2], m) |
                 (arc_goods_set(a_sets[2], m) & arc_goods_set(b_sets[1], m) &
                  arc_goods_set(c_sets[1], m)))
    assigned = [
        (0, arc_goods_set(a_sets[1], m)),
        (1, b2_bundle),
        (2, arc_goods_set(a_sets[0], m) & arc_goods_set(b_sets[0], m)),
    ]
    return _complete_roles(assigned, m)


# ---------------------------------------------------------------------------
# Dispatcher
# ---------------------------------------------------------------------------

def _report(inst: Instance, alloc: Allocation,
            c: Rational) -> GuaranteeReport:
    return build_report(inst, alloc, _mms_values(inst), c)


def best_guarantee(inst: Instance) -> tuple[Allocation, GuaranteeReport]:
    """Strongest certificate available: exact cases first, then the best
    applicable c-sufficient constructor, then the 1/2 fallback."""
    _require_cycle(inst)
    n, m = inst.n, inst.m
    one = Fraction(1)
    distinct = {u.values for u in inst.agents}
    if n == 1 or len(distinct) == 1 or (
            len(distinct) == 2 and
            min(sum(1 for u in inst.agents if u.values == v)
                for v in distinct) == 1):
        alloc = allocate_one_deviant(inst)
        return alloc, _report(inst, alloc, one)
    if m < 2 * n:
        alloc = allocate_cycle_m_lt_2n(inst)
        return alloc, _report(inst, alloc, one)
    if m == 2 * n:
        alloc = decide_cycle_m_eq_2n(inst)
        if alloc is not None:
            return alloc, _report(inst, alloc, one)
    if n == 3 and m <= 8:
        alloc = allocate_three_agents_small(inst)
        return alloc, _report(inst, alloc, one)
    if inst.type_ids is not None:
        alloc = allocate_cycle_fixed_types(inst)
        if alloc is not None:
            return alloc, _report(inst, alloc, one)
    t = len(_sorted_type_groups(inst))
    if n == 3:
        alloc = five_sixths_three_agents(inst)
        return alloc, _report(inst, alloc, Fraction(5, 6))
    candidates: list[tuple[Rational, object]] = []
    if t <= 3:
        candidates.append((ACCEPTABLE, three_quarters_three_types))
    else:
        candidates.append((Fraction(t, 2 * t - 2), t_over_2t2_sufficient))
    plan_c = max(_f(n, d) for d in range(n, n * n)) if n >= 2 else one
    candidates.append((plan_c, psi_sufficient))
    candidates.append((Fraction(1, 2), half_sufficient))
    candidates.sort(key=lambda t_: -t_[0])
    last_error: Optional[Exception] = None
    for c, ctor in candidates:
        try:
            alloc = ctor(inst)
            return alloc, _report(inst, alloc, c)
        except InternalInvariantError as exc:  # pragma: no cover - safety net
            last_error = exc
    raise last_error if last_error else InternalInvariantError(
        "no constructor applied")
