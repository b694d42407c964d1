"""Regularization: turn any agent collection on a cycle/unicyclic graph into
a regular one (every agent proportional with mms = 1) so that c-sufficient
allocations pull back to the original utilities.

Pipeline per agent: (1) rescale to integers, (2) compute the mms value,
(3) replace zero-mms agents' utilities with those of the smallest-index
positive-mms agent, (4) repeatedly binary-search each good's smallest value
that preserves the mms, until a fixpoint, (5) normalize totals to n.  If all
agents have mms = 0 the collection is trivial and any split is c-sufficient.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .mms_core import mms_value_int, rescale_to_integers
from .model import (
    Allocation,
    GoodsGraph,
    GuaranteeReport,
    Instance,
    InternalInvariantError,
    PreconditionError,
    Rational,
    Shape,
    UnsupportedShapeError,
    UtilityFunction,
    build_report,
    bundle_value,
)


class _Trivial:
    """Sentinel: every agent has mms = 0, any split is c-sufficient."""

    def __repr__(self) -> str:  # pragma: no cover
        return "TRIVIAL"


TRIVIAL = _Trivial()


@dataclass(frozen=True)
class AgentChain:
    """Per-agent transformation record."""

    scale: int                     # integer stage w_i = scale * original
    original_mms: Rational         # mms of the original utility
    substituted_from: Optional[int]  # donor agent index if original mms was 0
    reduced: tuple[int, ...]       # integer values after step (4)
    q: int                         # integer mms of the reduced stage
    # final = reduced / q, so mms(final) = 1 and total(final) = n


@dataclass(frozen=True)
class RegularizationCertificate:
    original: Instance
    regular: Instance
    chains: tuple[AgentChain, ...]


def _reduce_values(g: GoodsGraph, values: list[int], q: int,
                   n: int) -> tuple[int, ...]:
    """Step (4): minimize each good's value while preserving mms = q."""
    values = list(values)
    changed = True
    while changed:
        changed = False
        for x in range(g.m):
            if values[x] == 0:
                continue
            lo, hi = 0, values[x]
            # Smallest a with mms(values[x -> a]) still q (monotone in a).
            while lo < hi:
                mid = (lo + hi) // 2
                values[x], saved = mid, values[x]
                ok = mms_value_int(g, values, n) >= q
                values[x] = saved
                if ok:
                    hi = mid
                else:
                    lo = mid + 1
            if lo < values[x]:
                values[x] = lo
                changed = True
    return tuple(values)


def regularize(
        inst: Instance
) -> Union[_Trivial, tuple[Instance, RegularizationCertificate]]:
    """Regular collection + certificate, or TRIVIAL when every mms is 0."""
    g = inst.graph
    if g.shape not in (Shape.CYCLE, Shape.UNICYCLIC):
        raise UnsupportedShapeError("regularize expects a cycle or unicyclic")
    n = inst.n
    rescaled = [rescale_to_integers(u) for u in inst.agents]
    q0 = {}
    for i, r in enumerate(rescaled):
        key = r.scaled
        if key not in q0:
            q0[key] = mms_value_int(g, list(key), n)
    orig_q = [q0[r.scaled] for r in rescaled]
    if all(q == 0 for q in orig_q):
        return TRIVIAL
    donor = min(i for i in range(n) if orig_q[i] > 0)

    work: list[tuple[tuple[int, ...], int, Optional[int]]] = []
    for i in range(n):
        if orig_q[i] > 0:
            work.append((rescaled[i].scaled, orig_q[i], None))
        else:
            work.append((rescaled[donor].scaled, orig_q[donor], donor))

    reduced_cache: dict[tuple[int, ...], tuple[int, ...]] = {}
    chains = []
    finals = []
    for i in range(n):
        w, q, sub = work[i]
        if w not in reduced_cache:
            reduced_cache[w] = _reduce_values(g, list(w), q, n)
        red = reduced_cache[w]
        final = UtilityFunction(tuple(Fraction(v, q) for v in red))
        if final.total != n:
            raise InternalInvariantError(
                "reduction fixpoint is not proportional")
        finals.append(final)
        chains.append(AgentChain(
            scale=rescaled[i].scale,
            original_mms=Fraction(orig_q[i], rescaled[i].scale),
            substituted_from=sub,
            reduced=red,
            q=q,
        ))
    regular = Instance(g, tuple(finals), inst.type_ids)
    return regular, RegularizationCertificate(inst, regular, tuple(chains))


def regular_mms_values(cert: RegularizationCertificate) -> list[Rational]:
    """mms of every regularized agent (1 by construction)."""
    return [Fraction(1)] * cert.regular.n


def pull_back(alloc: Allocation, cert: RegularizationCertificate,
              c: Rational) -> GuaranteeReport:
    """Report the same split against the original utilities.

    Precondition: alloc is c-sufficient for the regularized instance (every
    bundle worth >= c to its regular owner).  The proof chain then guarantees
    c-sufficiency for the original utilities; the report verifies it.
    """
    c = Fraction(c)
    for u, b in zip(cert.regular.agents, alloc.bundles):
        if bundle_value(u, b) < c:
            raise PreconditionError(
                "allocation is not c-sufficient on the regularized instance")
    mms_orig = [ch.original_mms for ch in cert.chains]
    return build_report(cert.original, alloc, mms_orig, c)
