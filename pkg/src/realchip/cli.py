"""Command line front end.

All input and output is JSON.  Graphs are read from a file argument, with
"-" meaning stdin; divisors are passed inline as JSON text or as @path to
read them from a file.  Exit codes: 0 success, 1 domain error, 2 property
violated (a certificate is printed), 3 enumeration budget exceeded.
Output is byte-identical across reruns with the same inputs and seed.
"""

from __future__ import annotations

import argparse
import json
import sys

from .builders import (
    PROFILES,
    example1,
    example2,
    plain_banana,
    plain_cycle,
    random_real_graph,
    subdivide,
)
from .divisor import (
    divisor_from_doc,
    divisor_to_doc,
    potential_to_doc,
    q_reduce,
    rank,
)
from .errors import (
    EnumerationBudgetExceeded,
    RealChipError,
    SearchExhausted,
)
from .graph import check_invariant_bounds, from_json, graph_to_doc, invariants, to_json
from .metric import (
    is_M_metric,
    is_strong_M_metric,
    metric_equivalent,
    metric_find_real_g12,
    metric_from_json,
    metric_invariants,
    metric_rank,
    metric_real_rank,
    metric_to_doc,
    metric_totally_real_reduction,
    qdivisor_from_doc,
    qdivisor_to_doc,
    reduce_to_model,
)
from .properties import PROPERTY_NAMES, run_trials
from .realdivisor import (
    is_M_graph,
    is_real,
    is_strong_M_graph,
    parity_signature,
    real_rank,
    totally_real_reduction,
)

__all__ = ["main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _emit(doc) -> None:
    sys.stdout.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _read_doc_arg(arg: str):
    """Inline JSON, or @path to a JSON file."""
    text = _read_text(arg[1:]) if arg.startswith("@") else arg
    return json.loads(text)


def _load_graph(args):
    return from_json(_read_text(args.file))


def _load_metric(args):
    return metric_from_json(_read_text(args.file))


# ---------------------------------------------------------------------------
# commands

def cmd_info(args) -> int:
    g = _load_graph(args)
    rep = invariants(g)
    bounds = check_invariant_bounds(rep)
    _emit({
        "invariants": rep.as_dict(),
        "bounds": bounds,
        "m_graph": is_M_graph(g),
        "strong_m_graph": is_strong_M_graph(g),
    })
    return 0 if bounds["ok"] else 2


def cmd_rank(args) -> int:
    g = _load_graph(args)
    d = divisor_from_doc(g, _read_doc_arg(args.divisor))
    if args.real:
        value = real_rank(d, args.budget)
        _emit({"degree": d.degree(), "real": True, "real_rank": value})
        return 0
    value = rank(d, args.budget)
    form, wit = q_reduce(d)
    _emit({
        "degree": d.degree(),
        "real": False,
        "rank": value,
        "base_vertex": form.base_vertex,
        "reduced": divisor_to_doc(form.divisor),
        "witness": potential_to_doc(wit),
    })
    return 0


def cmd_reduce(args) -> int:
    g = _load_graph(args)
    d = divisor_from_doc(g, _read_doc_arg(args.divisor))
    out, f = totally_real_reduction(d)
    _emit({
        "reduced": divisor_to_doc(out),
        "witness": potential_to_doc(f),
        "totally_real": True,
        "parity_signature": parity_signature(out).as_dict(),
    })
    return 0


def _base_graph(spec: str):
    if spec.startswith("cycle:"):
        return plain_cycle(int(spec.split(":", 1)[1]))
    if spec.startswith("banana:"):
        return plain_banana(int(spec.split(":", 1)[1]))
    return from_json(_read_text(spec))


def cmd_gen(args) -> int:
    if args.kind == "example1":
        g = example1(args.g, args.s, args.a)
    elif args.kind == "example2":
        base = _base_graph(args.base)
        vertex = args.vertex if args.vertex is not None else base.vertices[0]
        g, _ = example2(base, vertex)
    else:
        g = random_real_graph(args.seed, args.max_vertices, args.max_edges,
                              args.profile)
    sys.stdout.write(to_json(g) + "\n")
    return 0


def cmd_subdivide(args) -> int:
    g = _load_graph(args)
    sys.stdout.write(to_json(subdivide(g, args.d)) + "\n")
    return 0


def cmd_metric_info(args) -> int:
    gamma = _load_metric(args)
    rep = metric_invariants(gamma)
    bounds = check_invariant_bounds(rep)
    _emit({
        "invariants": rep.as_dict(),
        "bounds": bounds,
        "m_metric": is_M_metric(gamma),
        "strong_m_metric": is_strong_M_metric(gamma),
        "reflected_edges": sorted(gamma.reflected_edges),
        "total_length": str(gamma.total_length()),
    })
    return 0 if bounds["ok"] else 2


def cmd_metric_model(args) -> int:
    gamma = _load_metric(args)
    red = reduce_to_model(gamma, (), args.multiplier, args.budget)
    _emit({"scale": red.scale, "graph": graph_to_doc(red.graph)})
    return 0


def cmd_metric_rank(args) -> int:
    gamma = _load_metric(args)
    d = qdivisor_from_doc(gamma, _read_doc_arg(args.divisor))
    if args.real:
        value = metric_real_rank(d, args.budget)
        _emit({"degree": d.degree(), "real": True, "real_rank": value})
    else:
        value = metric_rank(d, args.budget)
        _emit({"degree": d.degree(), "real": False, "rank": value})
    return 0


def cmd_metric_equivalent(args) -> int:
    gamma = _load_metric(args)
    d1 = qdivisor_from_doc(gamma, _read_doc_arg(args.divisor))
    d2 = qdivisor_from_doc(gamma, _read_doc_arg(args.other))
    wit = metric_equivalent(d1, d2, args.budget)
    _emit({
        "equivalent": wit is not None,
        "witness": wit.as_doc() if wit is not None else None,
    })
    return 0


def cmd_metric_reduce(args) -> int:
    gamma = _load_metric(args)
    d = qdivisor_from_doc(gamma, _read_doc_arg(args.divisor))
    out, wit = metric_totally_real_reduction(d, args.budget)
    _emit({
        "reduced": qdivisor_to_doc(out),
        "witness": wit.as_doc(),
        "totally_real": True,
    })
    return 0


def cmd_metric_g12(args) -> int:
    gamma = _load_metric(args)
    d = metric_find_real_g12(gamma, args.budget)
    _emit({"divisor": qdivisor_to_doc(d), "degree": d.degree()})
    return 0


def cmd_metric_json(args) -> int:
    gamma = _load_metric(args)
    _emit(metric_to_doc(gamma))
    return 0


def cmd_fuzz(args) -> int:
    names = tuple(p.strip() for p in args.properties.split(",") if p.strip())
    report = run_trials(args.seed, args.trials, args.max_vertices,
                        args.max_edges, names, args.jobs, args.budget,
                        args.profile)
    _emit(report.as_doc())
    return 0 if report.ok else 2


# ---------------------------------------------------------------------------
# parser

def _add_budget(p) -> None:
    p.add_argument("--budget", type=int, default=None,
                   help="enumeration cap (default: REALCHIP_BUDGET or built-in)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="realchip",
                     description="Divisor theory on graphs with a real structure.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", help="invariants and bound checks")
    p.add_argument("file", nargs="?", default="-")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("rank", help="Baker-Norine rank or real rank")
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("--divisor", "-D", required=True,
                   help='JSON like {"v": 1}, or @path')
    p.add_argument("--real", action="store_true")
    _add_budget(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("reduce", help="totally real reduction (M-graphs)")
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("--divisor", "-D", required=True)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("gen", help="constructions and random graphs")
    gsub = p.add_subparsers(dest="kind", required=True)
    q = gsub.add_parser("example1", help="graph with prescribed (g, s, a)")
    q.add_argument("--g", type=int, required=True)
    q.add_argument("--s", type=int, required=True)
    q.add_argument("--a", type=int, required=True)
    q.set_defaults(func=cmd_gen)
    q = gsub.add_parser("example2",
                        help="doubled graph where real rank exceeds rank at v")
    q.add_argument("--base", required=True,
                   help="graph JSON path, cycle:N, or banana:N")
    q.add_argument("--vertex", default=None,
                   help="base vertex to attach at (default: least)")
    q.set_defaults(func=cmd_gen)
    q = gsub.add_parser("random", help="seeded random real graph")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--max-vertices", type=int, default=10)
    q.add_argument("--max-edges", type=int, default=16)
    q.add_argument("--profile", choices=PROFILES, default="default")
    q.set_defaults(func=cmd_gen)

    p = sub.add_parser("subdivide", help="replace each edge by a chain")
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("-d", type=int, required=True, help="pieces per edge")
    p.set_defaults(func=cmd_subdivide)

    p = sub.add_parser("metric", help="rational metric graph commands")
    msub = p.add_subparsers(dest="metric_command", required=True)
    q = msub.add_parser("info", help="invariants of the metric graph")
    q.add_argument("file", nargs="?", default="-")
    q.set_defaults(func=cmd_metric_info)
    q = msub.add_parser("model", help="unit-length subdivided model")
    q.add_argument("file", nargs="?", default="-")
    q.add_argument("--multiplier", type=int, default=1)
    _add_budget(q)
    q.set_defaults(func=cmd_metric_model)
    q = msub.add_parser("rank", help="rank or real rank of a point divisor")
    q.add_argument("file", nargs="?", default="-")
    q.add_argument("--divisor", "-D", required=True,
                   help='JSON like [[["vertex", "v"], 1]], or @path')
    q.add_argument("--real", action="store_true")
    _add_budget(q)
    q.set_defaults(func=cmd_metric_rank)
    q = msub.add_parser("equivalent", help="decide linear equivalence")
    q.add_argument("file", nargs="?", default="-")
    q.add_argument("--divisor", "-D", required=True)
    q.add_argument("--other", "-E", required=True)
    _add_budget(q)
    q.set_defaults(func=cmd_metric_equivalent)
    q = msub.add_parser("reduce", help="totally real reduction")
    q.add_argument("file", nargs="?", default="-")
    q.add_argument("--divisor", "-D", required=True)
    _add_budget(q)
    q.set_defaults(func=cmd_metric_reduce)
    q = msub.add_parser("g12", help="real degree-2 divisor of rank 1")
    q.add_argument("file", nargs="?", default="-")
    _add_budget(q)
    q.set_defaults(func=cmd_metric_g12)
    q = msub.add_parser("json", help="normalized metric graph document")
    q.add_argument("file", nargs="?", default="-")
    q.set_defaults(func=cmd_metric_json)

    p = sub.add_parser("fuzz", help="seeded property checks on random graphs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--max-vertices", type=int, default=10)
    p.add_argument("--max-edges", type=int, default=16)
    p.add_argument("--properties", default="all",
                   help=f"comma list from: {', '.join(PROPERTY_NAMES)}, all")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--profile", choices=PROFILES, default="default")
    _add_budget(p)
    p.set_defaults(func=cmd_fuzz)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except EnumerationBudgetExceeded as exc:
        _emit({"error": "budget", "detail": str(exc)})
        return 3
    except SearchExhausted as exc:
        _emit({"error": "property_violated", "detail": str(exc)})
        return 2
    except (RealChipError, ValueError, KeyError, OSError) as exc:
        _emit({"error": "domain", "detail": str(exc)})
        return 1


if __name__ == "__main__":
    sys.exit(main())
