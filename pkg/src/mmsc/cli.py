"""Command-line front end.

Instance files are line-oriented plain text::

    mmsc 1
    graph cycle 9
    agents 3
    u 0 3 1 3 1 3 0 2 2
    u 2 2 0 3 1 3 1 3 0
    u 1 3 2 3 0 3 2 3 1
    types 1 2 3

Tree/unicyclic/general graphs add ``edge a b`` lines after the graph line.
Utilities are integers or ``p/q`` rationals.  The ``types`` line is optional;
without it every agent is her own type (the fixed-type DP method then needs
it explicitly).

Exit codes: 0 success/YES, 1 NO/NONE, 2 usage/parse error, 3 over-budget,
4 internal-invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import random
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import csuff, exact_alloc
from .model import (
    Allocation,
    Arc,
    Bundle,
    GoodsGraph,
    GuaranteeReport,
    Instance,
    InternalInvariantError,
    MmscError,
    OverBudgetError,
    PreconditionError,
    Rational,
    Shape,
    UnsupportedShapeError,
    UtilityFunction,
    build_report,
)
from .mms_core import mms_for_graph
from .oracle import (
    OracleBudget,
    oracle_exists_mms_allocation,
    oracle_max_c,
    oracle_mms,
)

EXIT_OK = 0
EXIT_NONE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_INTERNAL = 4


class ParseError(MmscError):
    def __init__(self, line_no: int, message: str) -> None:
        super().__init__(f"line {line_no}: {message}")


# ---------------------------------------------------------------------------
# Instance file format
# ---------------------------------------------------------------------------

_SHAPES_WITH_EDGES = {"tree", "unicyclic", "general"}


def _parse_rational(tok: str, line_no: int) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(line_no, f"bad rational {tok!r}") from None


def parse_instance(text: str) -> Instance:
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(no, ln) for no, ln in lines if ln and not ln.startswith("#")]
    pos = 0

    def take(expect: Optional[str] = None) -> tuple[int, list[str]]:
        nonlocal pos
        if pos >= len(lines):
            raise ParseError(len(lines) + 1, "unexpected end of file")
        no, ln = lines[pos]
        pos += 1
        toks = ln.split()
        if expect is not None and toks[0] != expect:
            raise ParseError(no, f"expected {expect!r}, got {toks[0]!r}")
        return no, toks

    no, toks = take()
    if toks != ["mmsc", "1"]:
        raise ParseError(no, 'header must be "mmsc 1"')
    no, toks = take("graph")
    if len(toks) != 3:
        raise ParseError(no, "graph line needs a shape and a good count")
    shape, m_tok = toks[1], toks[2]
    try:
        m = int(m_tok)
    except ValueError:
        raise ParseError(no, f"bad good count {m_tok!r}") from None
    edges = []
    while pos < len(lines) and lines[pos][1].split()[0] == "edge":
        no, toks = take("edge")
        if shape not in _SHAPES_WITH_EDGES:
            raise ParseError(no, f"{shape} graphs take no edge lines")
        try:
            edges.append((int(toks[1]), int(toks[2])))
        except (IndexError, ValueError):
            raise ParseError(no, "edge line needs two integers") from None
    try:
        if shape == "path":
            g = GoodsGraph.path(m)
        elif shape == "cycle":
            g = GoodsGraph.cycle(m)
        elif shape == "tree":
            g = GoodsGraph.tree(m, edges)
        elif shape == "unicyclic":
            g = GoodsGraph.unicyclic(m, edges)
        elif shape == "general":
            g = GoodsGraph.general(m, edges)
        else:
            raise ParseError(no, f"unknown graph shape {shape!r}")
    except MmscError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(no, str(exc)) from None
    no, toks = take("agents")
    try:
        n = int(toks[1])
    except (IndexError, ValueError):
        raise ParseError(no, "agents line needs an integer") from None
    agents = []
    for _ in range(n):
        no, toks = take("u")
        if len(toks) != m + 1:
            raise ParseError(no, f"utility line needs {m} values")
        agents.append(UtilityFunction(
            tuple(_parse_rational(t, no) for t in toks[1:])))
    type_ids = None
    if pos < len(lines):
        no, toks = take("types")
        if len(toks) != n + 1:
            raise ParseError(no, f"types line needs {n} ids")
        try:
            type_ids = tuple(int(t) for t in toks[1:])
        except ValueError:
            raise ParseError(no, "type ids must be integers") from None
    if pos < len(lines):
        raise ParseError(lines[pos][0], "trailing content")
    try:
        return Instance(g, tuple(agents), type_ids)
    except MmscError as exc:
        raise ParseError(no, str(exc)) from None


def serialize_instance(inst: Instance) -> str:
    out = ["mmsc 1"]
    g = inst.graph
    out.append(f"graph {g.shape.value} {g.m}")
    if g.shape.value in _SHAPES_WITH_EDGES:
        for a, b in g.edges:
            out.append(f"edge {a} {b}")
    out.append(f"agents {inst.n}")
    for u in inst.agents:
        out.append("u " + " ".join(str(v) for v in u.values))
    if inst.type_ids is not None:
        out.append("types " + " ".join(str(t) for t in inst.type_ids))
    return "\n".join(out) + "\n"


def _load(path: str) -> Instance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(0, f"cannot read {path}: {exc}") from None
    return parse_instance(text)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def _rat(x: Rational, approx: bool = False) -> str:
    s = str(Fraction(x))
    if approx:
        s += f" (~{float(x):.6g})"
    return s


def _bundle_str(b: Bundle, m: int) -> str:
    if isinstance(b, Arc):
        return f"{b.start}:{b.length}"
    return "{" + ",".join(str(v) for v in sorted(b)) + "}"


def _budget_from_env(**overrides) -> OracleBudget:
    budget = OracleBudget(**overrides)
    if "MMSC_ORACLE_MAX_WORK" in os.environ:
        budget.max_work = int(os.environ["MMSC_ORACLE_MAX_WORK"])
    if "MMSC_ORACLE_MAX_GOODS" in os.environ:
        goods = int(os.environ["MMSC_ORACLE_MAX_GOODS"])
        budget.max_cycle_goods = goods
        budget.max_general_goods = goods
    return budget


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_mms(args: argparse.Namespace) -> int:
    inst = _load(args.file)
    i = args.agent - 1
    if not 0 <= i < inst.n:
        raise PreconditionError(f"agent {args.agent} out of range 1..{inst.n}")
    n = args.n if args.n is not None else inst.n
    u = inst.agents[i]
    if args.oracle:
        budget = _budget_from_env()
        value = oracle_mms(inst.graph, u, n, budget)
        print(_rat(value, args.approx))
        return EXIT_OK
    if inst.graph.shape is Shape.GENERAL:
        raise UnsupportedShapeError(
            "general graphs need --oracle (no exact closed form)")
    res = mms_for_graph(inst.graph, u, n)
    print(_rat(res.value, args.approx))
    print("split " + " ".join(_bundle_str(b, inst.m)
                              for b in res.split.bundles))
    return EXIT_OK


def _method_table():
    return {
        "half": csuff.half_sufficient,
        "psi": csuff.psi_sufficient,
        "t-types": csuff.t_over_2t2_sufficient,
        "two-types-34": csuff.three_quarters_two_types,
        "three-types-34": csuff.three_quarters_three_types,
        "five-sixths": csuff.five_sixths_three_agents,
        "tree": exact_alloc.allocate_tree,
        "one-deviant": exact_alloc.allocate_one_deviant,
        "m-lt-2n": exact_alloc.allocate_cycle_m_lt_2n,
        "m-eq-2n": exact_alloc.decide_cycle_m_eq_2n,
        "three-small": exact_alloc.allocate_three_agents_small,
        "dp-types": exact_alloc.allocate_cycle_fixed_types,
    }


#: Advertised guarantee per method; None means "exact" (c = 1).
_METHOD_C = {
    "five-sixths": Fraction(5, 6),
    "two-types-34": Fraction(3, 4),
    "three-types-34": Fraction(3, 4),
    "half": Fraction(1, 2),
}


def _method_c(name: str, inst: Instance) -> Fraction:
    if name in _METHOD_C:
        return _METHOD_C[name]
    if name == "t-types":
        t = len({u.values for u in inst.agents})
        return Fraction(t, 2 * t - 2) if t >= 4 else Fraction(1)
    if name == "psi":
        n = inst.n
        if n < 2:
            return Fraction(1)
        return max(csuff._f(n, d) for d in range(n, n * n))
    return Fraction(1)


def _allocate_with(inst: Instance,
                   method: str) -> tuple[Optional[Allocation],
                                         Optional[GuaranteeReport]]:
    if method == "auto":
        if inst.graph.shape in (Shape.PATH, Shape.TREE):
            alloc = exact_alloc.allocate_tree(inst)
            mms = [mms_for_graph(inst.graph, u, inst.n).value
                   for u in inst.agents]
            return alloc, build_report(inst, alloc, mms, Fraction(1))
        return csuff.best_guarantee(inst)
    if method == "dp-types" and inst.type_ids is None:
        raise PreconditionError("dp-types needs an explicit types line")
    alloc = _method_table()[method](inst)
    if alloc is None:
        return None, None
    mms = [mms_for_graph(inst.graph, u, inst.n).value for u in inst.agents]
    return alloc, build_report(inst, alloc, mms, _method_c(method, inst))


def cmd_allocate(args: argparse.Namespace) -> int:
    inst = _load(args.file)
    alloc, report = _allocate_with(inst, args.method)
    if alloc is None:
        print("NONE")
        return EXIT_NONE
    for i, (b, r) in enumerate(zip(alloc.bundles, report.agents)):
        ratio = "SATISFIED-TRIVIALLY" if r.ratio is None else _rat(
            r.ratio, args.approx)
        print(f"agent {i + 1}: arc {_bundle_str(b, inst.m)} "
              f"value {_rat(r.value, args.approx)} ratio {ratio}")
    print(f"certified_c {_rat(report.certified_c, args.approx)}")
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    inst = _load(args.file)
    budget = _budget_from_env()
    if args.mms is not None:
        i = args.mms - 1
        if not 0 <= i < inst.n:
            raise PreconditionError(
                f"agent {args.mms} out of range 1..{inst.n}")
        print(_rat(oracle_mms(inst.graph, inst.agents[i], inst.n, budget),
                   args.approx))
        return EXIT_OK
    if args.exists:
        alloc = oracle_exists_mms_allocation(inst, budget)
        if alloc is None:
            print("NO")
            return EXIT_NONE
        print("YES")
        for i, b in enumerate(alloc.bundles):
            print(f"agent {i + 1}: {_bundle_str(b, inst.m)}")
        return EXIT_OK
    # --max-c
    c = oracle_max_c(inst, budget)
    print("UNBOUNDED" if c == float("inf") else _rat(c, args.approx))
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    if args.m < 1 or args.n < 1:
        raise PreconditionError("need m >= 1 and n >= 1")
    t = args.types if args.types is not None else args.n
    if not 1 <= t <= args.n:
        raise PreconditionError("types must be between 1 and n")
    rng = random.Random(args.seed)
    rows = [[rng.randint(0, args.max_value) for _ in range(args.m)]
            for _ in range(t)]
    # Spread the n agents over the t types, first types get the extras.
    counts = [args.n // t + (1 if i < args.n % t else 0) for i in range(t)]
    agents, type_ids = [], []
    for ti, cnt in enumerate(counts):
        for _ in range(cnt):
            agents.append(UtilityFunction(tuple(Fraction(v)
                                                for v in rows[ti])))
            type_ids.append(ti + 1)
    inst = Instance(GoodsGraph.cycle(args.m), tuple(agents),
                    tuple(type_ids) if args.types is not None else None)
    sys.stdout.write(serialize_instance(inst))
    return EXIT_OK


_CSV_HEADER = ["instance", "method", "mms", "values", "certified_c",
               "oracle_max_c", "seconds", "error"]


def _batch_row(name: str, inst: Instance, method: str,
               oracle_c: str) -> list[str]:
    start = time.monotonic()
    try:
        alloc, report = _allocate_with(inst, method)
        elapsed = f"{time.monotonic() - start:.3f}"
        if alloc is None:
            return [name, method, "", "", "", oracle_c, elapsed, "NONE"]
        return [
            name, method,
            ";".join(_rat(a.mms) for a in report.agents),
            ";".join(_rat(a.value) for a in report.agents),
            _rat(report.certified_c), oracle_c, elapsed, "",
        ]
    except (PreconditionError, UnsupportedShapeError) as exc:
        elapsed = f"{time.monotonic() - start:.3f}"
        return [name, method, "", "", "", oracle_c, elapsed,
                f"inapplicable: {exc}"]
    except (OverBudgetError, InternalInvariantError, MmscError) as exc:
        elapsed = f"{time.monotonic() - start:.3f}"
        return [name, method, "", "", "", oracle_c, elapsed,
                f"{type(exc).__name__}: {exc}"]


def cmd_batch(args: argparse.Namespace) -> int:
    directory = Path(args.dir)
    if not directory.is_dir():
        raise ParseError(0, f"not a directory: {args.dir}")
    methods = ["auto"] if not args.all_methods else \
        ["auto"] + sorted(_method_table())
    rows: list[list[str]] = []
    for path in sorted(directory.iterdir()):
        if not path.is_file():
            continue
        name = path.name
        try:
            inst = parse_instance(path.read_text())
        except MmscError as exc:
            rows.append([name, "", "", "", "", "", "", f"parse: {exc}"])
            continue
        oracle_c = ""
        if not args.no_oracle:
            try:
                c = oracle_max_c(inst, _budget_from_env())
                oracle_c = "UNBOUNDED" if c == float("inf") else _rat(c)
            except (OverBudgetError, MmscError):
                oracle_c = ""
        for method in methods:
            rows.append(_batch_row(name, inst, method, oracle_c))
    rows.sort(key=lambda r: (r[0], r[1]))
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(_CSV_HEADER)
    writer.writerows(rows)
    if args.csv:
        Path(args.csv).write_text(out.getvalue())
    else:
        sys.stdout.write(out.getvalue())
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmsc",
        description="Exact maximin-share fair division on cycles and trees.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mms", help="maximin share of one agent")
    p.add_argument("file")
    p.add_argument("--agent", type=int, default=1,
                   help="1-based agent index (default 1)")
    p.add_argument("--n", type=int, default=None,
                   help="number of shares (default: number of agents)")
    p.add_argument("--oracle", action="store_true",
                   help="brute-force enumeration (required for general graphs)")
    p.add_argument("--approx", action="store_true")
    p.set_defaults(func=cmd_mms)

    p = sub.add_parser("allocate", help="construct a guaranteed allocation")
    p.add_argument("file")
    p.add_argument("--method", default="auto",
                   choices=["auto"] + sorted(_method_table()))
    p.add_argument("--approx", action="store_true")
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("oracle", help="exact brute-force answers")
    p.add_argument("file")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--max-c", action="store_true")
    group.add_argument("--exists", action="store_true")
    group.add_argument("--mms", type=int, metavar="AGENT")
    p.add_argument("--approx", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="seeded random cycle instance")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--types", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-value", type=int, default=9)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("batch", help="CSV report over a directory")
    p.add_argument("dir")
    p.add_argument("--csv", default=None, help="output file (default stdout)")
    p.add_argument("--all-methods", action="store_true",
                   help="try every method, not just auto")
    p.add_argument("--no-oracle", action="store_true",
                   help="skip the oracle max-c column")
    p.set_defaults(func=cmd_batch)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PreconditionError, UnsupportedShapeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OverBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InternalInvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
