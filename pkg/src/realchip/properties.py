"""Seeded property checks over randomly generated graphs.

Each property takes a graph plus a deterministic random stream and either
passes (None), fails with a human-readable detail string, or requests a
skip when the instance is out of budget or out of scope.  The runner
generates one graph per trial, evaluates the selected properties, and on
the first failure shrinks the counterexample by greedily deleting
conjugation orbits of edges and vertices while the failure persists.

Trials are independent, so they can run in a process pool; results are
aggregated in trial order, which keeps the report byte-stable for a fixed
seed regardless of worker count.
"""

from __future__ import annotations

import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from concurrent.futures.process import BrokenProcessPool
from dataclasses import dataclass
from fractions import Fraction

from .builders import random_real_graph, subdivide
from .divisor import (
    Divisor,
    PotentialFunction,
    canonical_divisor,
    divisor_to_doc,
    is_q_reduced,
    laplacian,
    linearly_equivalent,
    q_reduce,
    rank,
)
from .errors import (
    EnumerationBudgetExceeded,
    GraphValidationError,
    NotMGraph,
    NotStrongMGraph,
)
from .graph import (
    RealGraph,
    check_invariant_bounds,
    from_json,
    genus_decomposition_check,
    graph_to_doc,
    invariants,
    to_json,
    validate,
)
from .metric import (
    QDivisor,
    QMetricGraph,
    metric_from_json,
    metric_rank,
    metric_to_json,
    rank as _model_rank,
    reduce_to_model,
    vertex_point,
)
from .realdivisor import (
    conjugate,
    find_real_g12,
    is_M_graph,
    is_real,
    is_real_potential,
    is_strong_M_graph,
    is_totally_real,
    parity_signature,
    real_rank,
    real_witness,
    symmetrize,
    totally_real_reduction,
)

__all__ = [
    "PROPERTY_NAMES",
    "Violation",
    "FuzzReport",
    "expand_properties",
    "check_graph",
    "shrink",
    "run_trials",
]


class _SkipTrial(Exception):
    """Raised inside a property when the instance is out of scope."""


# ---------------------------------------------------------------------------
# random ingredients

def _random_divisor(g: RealGraph, rng: random.Random,
                    lo: int = -2, hi: int = 2, spots: int = 3) -> Divisor:
    verts = rng.sample(g.vertices, min(spots, len(g.vertices)))
    return Divisor(g, {v: rng.randint(lo, hi) for v in verts})


def _orbits(g: RealGraph) -> list[tuple[str, ...]]:
    out: list[tuple[str, ...]] = [(v,) for v in g.real_vertices]
    out += [pair for pair in g.nonreal_pairs()]
    return sorted(out)


def _random_real_divisor(g: RealGraph, rng: random.Random,
                         lo: int = -2, hi: int = 2, spots: int = 3) -> Divisor:
    orbs = _orbits(g)
    chosen = rng.sample(orbs, min(spots, len(orbs)))
    coeffs: dict[str, int] = {}
    for orb in chosen:
        c = rng.randint(lo, hi)
        for v in orb:
            coeffs[v] = c
    return Divisor(g, coeffs)


def _random_real_effective(g: RealGraph, rng: random.Random,
                           degree: int) -> Divisor:
    """A real effective divisor of the requested degree when parity allows,
    one less otherwise."""
    orbs = _orbits(g)
    singles = [o for o in orbs if len(o) == 1]
    coeffs: dict[str, int] = {}
    total = 0
    while total < degree:
        pool = orbs if total + 2 <= degree or not singles else singles
        if total + 1 == degree and not singles:
            break
        orb = rng.choice(pool if pool else orbs)
        if len(orb) == 2 and total + 2 > degree:
            break
        for v in orb:
            coeffs[v] = coeffs.get(v, 0) + 1
            total += 1
    return Divisor(g, coeffs)


def _random_potential(g: RealGraph, rng: random.Random,
                      lo: int = -2, hi: int = 2) -> PotentialFunction:
    return PotentialFunction(g, {v: rng.randint(lo, hi) for v in g.vertices})


def _random_real_potential(g: RealGraph, rng: random.Random,
                           lo: int = -2, hi: int = 2) -> PotentialFunction:
    vals: dict[str, int] = {}
    for orb in _orbits(g):
        c = rng.randint(lo, hi)
        for v in orb:
            vals[v] = c
    return PotentialFunction(g, vals)


def _invariant_tuple(g: RealGraph) -> tuple[int, int, int, int, int]:
    rep = invariants(g)
    return (rep.genus, rep.s, rep.s_prime, rep.isolated_real_edge_count, rep.a)


# ---------------------------------------------------------------------------
# properties

def _prop_invariants(g: RealGraph, rng: random.Random,
                     budget: int | None) -> str | None:
    rep = invariants(g)
    chk = check_invariant_bounds(rep)
    if not chk["ok"]:
        return f"invariant bounds violated: {json.dumps(chk, sort_keys=True)}"
    recount = rep.isolated_real_edge_count + sum(
        c.genus() + 1 for c in rep.components_of_real_locus)
    if recount != rep.s:
        return f"s recount {recount} disagrees with reported s {rep.s}"
    return None


def _prop_genus_decomposition(g: RealGraph, rng: random.Random,
                              budget: int | None) -> str | None:
    subset = [e for e in g.edges if rng.random() < 0.5]
    if not genus_decomposition_check(g, subset):
        return f"genus decomposition failed for edge subset {sorted(subset)}"
    return None


def _prop_roundtrip(g: RealGraph, rng: random.Random,
                    budget: int | None) -> str | None:
    text = to_json(g)
    h = from_json(text)
    if h != g:
        return "JSON roundtrip changed the graph"
    if to_json(h) != text:
        return "JSON output is not stable under reserialization"
    return None


def _prop_relabel(g: RealGraph, rng: random.Random,
                  budget: int | None) -> str | None:
    vnames = [f"x{i}" for i in range(len(g.vertices))]
    rng.shuffle(vnames)
    vmap = dict(zip(g.vertices, vnames))
    enames = [f"y{i}" for i in range(len(g.edges))]
    rng.shuffle(enames)
    emap = dict(zip(g.edges, enames))
    h = g.relabel(vmap, emap)
    if _invariant_tuple(g) != _invariant_tuple(h):
        return (f"relabeling changed invariants from {_invariant_tuple(g)} "
                f"to {_invariant_tuple(h)}")
    d = _random_divisor(g, rng, lo=0, hi=2, spots=2)
    dh = Divisor(h, {vmap[v]: c for v, c in d.coeffs().items()})
    try:
        ra, rb = rank(d, budget), rank(dh, budget)
    except EnumerationBudgetExceeded:
        raise _SkipTrial from None
    if ra != rb:
        return (f"rank changed under relabeling: {ra} vs {rb} for "
                f"{json.dumps(divisor_to_doc(d), sort_keys=True)}")
    return None


def _prop_reduction(g: RealGraph, rng: random.Random,
                    budget: int | None) -> str | None:
    d = _random_divisor(g, rng)
    form, f = q_reduce(d)
    doc = json.dumps(divisor_to_doc(d), sort_keys=True)
    if not is_q_reduced(form.divisor, form.base_vertex):
        return f"reduction of {doc} is not q-reduced"
    if form.divisor.degree() != d.degree():
        return f"reduction of {doc} changed the degree"
    if d + laplacian(g, f) != form.divisor:
        return f"reduction witness for {doc} does not connect the divisors"
    again, _ = q_reduce(form.divisor, form.base_vertex)
    if again.divisor != form.divisor:
        return f"reduction of {doc} is not idempotent"
    return None


def _prop_parity(g: RealGraph, rng: random.Random,
                 budget: int | None) -> str | None:
    d = _random_real_divisor(g, rng)
    f = _random_real_potential(g, rng)
    moved = d + laplacian(g, f)
    if parity_signature(d) != parity_signature(moved):
        return (f"parity signature changed along a real principal divisor "
                f"for {json.dumps(divisor_to_doc(d), sort_keys=True)}")
    k = canonical_divisor(g)
    sig = parity_signature(k)
    if any(sig.parities):
        return (f"canonical divisor has an odd real component: "
                f"{json.dumps(sig.as_dict(), sort_keys=True)}")
    return None


def _prop_real_witness(g: RealGraph, rng: random.Random,
                       budget: int | None) -> str | None:
    d = _random_real_divisor(g, rng)
    f0 = (_random_real_potential(g, rng) if rng.random() < 0.6
          else _random_potential(g, rng))
    moved = d + laplacian(g, f0)
    if not is_real(moved):
        raise _SkipTrial
    w = real_witness(d, moved)
    if not is_real_potential(w):
        return "extracted witness is not conjugation invariant"
    if d + laplacian(g, w) != moved:
        return "extracted witness does not connect the divisors"
    return None


def _prop_real_rank(g: RealGraph, rng: random.Random,
                    budget: int | None) -> str | None:
    d = _random_real_effective(g, rng, rng.randint(0, 3))
    try:
        rr = real_rank(d, budget)
        r = rank(d, budget)
    except EnumerationBudgetExceeded:
        raise _SkipTrial from None
    if rr < r:
        return (f"real rank {rr} is below rank {r} for "
                f"{json.dumps(divisor_to_doc(d), sort_keys=True)}")
    f = _random_potential(g, rng, lo=-1, hi=1)
    base = _random_real_divisor(g, rng, lo=0, hi=2)
    moved = base + laplacian(g, f)
    mins = Divisor(g, {v: min(moved[v], moved[g.sigma_v(v)])
                       for v in g.vertices})
    if not moved.is_effective() or not mins.is_effective():
        raise _SkipTrial
    gmax, out = symmetrize(base, f, mins)
    if not (is_real(out) and out.is_effective()
            and (out - mins).is_effective()):
        return "symmetrized divisor misses a postcondition"
    if base + laplacian(g, gmax) != out:
        return "symmetrization witness does not connect the divisors"
    return None


def _prop_totally_real(g: RealGraph, rng: random.Random,
                       budget: int | None) -> str | None:
    d = _random_real_effective(g, rng, rng.randint(0, 4))
    if not is_M_graph(g):
        try:
            totally_real_reduction(d)
        except NotMGraph:
            return None
        return "reduction on a graph with s < g + 1 did not refuse"
    out, f = totally_real_reduction(d)
    doc = json.dumps(divisor_to_doc(d), sort_keys=True)
    if not (out.is_effective() and is_totally_real(out)):
        return f"reduction of {doc} is not totally real effective"
    if not is_real_potential(f):
        return f"reduction witness for {doc} is not real"
    if d + laplacian(g, f) != out:
        return f"reduction witness for {doc} does not connect the divisors"
    return None


def _prop_g12(g: RealGraph, rng: random.Random,
              budget: int | None) -> str | None:
    if not is_strong_M_graph(g):
        try:
            find_real_g12(g, budget)
        except NotStrongMGraph:
            return None
        except EnumerationBudgetExceeded:
            raise _SkipTrial from None
        return "degree-2 search on a non-strong graph did not refuse"
    try:
        d = find_real_g12(g, budget)
        r = rank(d, budget)
    except EnumerationBudgetExceeded:
        raise _SkipTrial from None
    if d.degree() != 2 or not d.is_effective() or not is_real(d):
        return (f"degree-2 search returned "
                f"{json.dumps(divisor_to_doc(d), sort_keys=True)}")
    if r < 1:
        return f"degree-2 divisor has rank {r}"
    if g.genus() >= 1 and r != 1:
        return f"degree-2 divisor has rank {r} on a graph of genus >= 1"
    return None


def _subdivision_tuple(g: RealGraph) -> tuple[int, int, int, int]:
    """(g, s, a) plus the total real-locus component count.

    s_prime and the isolated-edge count are not separately preserved by
    subdivision: an even split turns an isolated real edge into a chain
    with a real midpoint vertex.  Their sum is preserved, as are g, s, a.
    """
    rep = invariants(g)
    return (rep.genus, rep.s, rep.a,
            rep.s_prime + rep.isolated_real_edge_count)


def _prop_subdivision(g: RealGraph, rng: random.Random,
                      budget: int | None) -> str | None:
    d = rng.choice((2, 3))
    h = subdivide(g, d)
    if _subdivision_tuple(g) != _subdivision_tuple(h):
        return (f"subdividing by {d} changed invariants from "
                f"{_subdivision_tuple(g)} to {_subdivision_tuple(h)}")
    if from_json(to_json(h)) != h:
        return f"subdivision by {d} does not roundtrip through JSON"
    if subdivide(g, 1) != g:
        return "subdividing by 1 changed the graph"
    return None


def _prop_metric(g: RealGraph, rng: random.Random,
                 budget: int | None) -> str | None:
    lengths: dict[str, Fraction] = {}
    for e in g.edges:
        mate = g.sigma_e(e)
        if mate < e:
            continue
        val = Fraction(rng.randint(1, 2), rng.randint(1, 4))
        lengths[e] = val
        lengths[mate] = val
    gamma = QMetricGraph(g, lengths)
    if metric_from_json(metric_to_json(gamma)) != gamma:
        return "metric JSON roundtrip changed the graph"
    scale = math.lcm(*(val.denominator for val in lengths.values())) if lengths else 1
    if 2 * sum(val * scale for val in lengths.values()) > 240:
        raise _SkipTrial
    d = QDivisor(gamma, [(vertex_point(rng.choice(g.vertices)), 1)])
    try:
        r1 = metric_rank(d, budget)
        red2 = reduce_to_model(gamma, d.support(), multiplier=2, budget=budget)
        r2 = _model_rank(red2.push(d), budget)
    except EnumerationBudgetExceeded:
        raise _SkipTrial from None
    if r1 != r2:
        return (f"metric rank is not refinement stable: {r1} at scale L, "
                f"{r2} at scale 2L")
    return None


def _prop_always_violated(g: RealGraph, rng: random.Random,
                          budget: int | None) -> str | None:
    return "this check fails on every graph (plumbing probe)"


_PROPERTIES = {
    "invariants": _prop_invariants,
    "genus_decomposition": _prop_genus_decomposition,
    "roundtrip": _prop_roundtrip,
    "relabel": _prop_relabel,
    "reduction": _prop_reduction,
    "parity": _prop_parity,
    "real_witness": _prop_real_witness,
    "real_rank": _prop_real_rank,
    "totally_real": _prop_totally_real,
    "g12": _prop_g12,
    "subdivision": _prop_subdivision,
    "metric": _prop_metric,
    "_always_violated": _prop_always_violated,
}

PROPERTY_NAMES = tuple(sorted(n for n in _PROPERTIES if not n.startswith("_")))


def expand_properties(names) -> tuple[str, ...]:
    out: list[str] = []
    for name in names:
        if name == "all":
            out.extend(PROPERTY_NAMES)
        elif name in _PROPERTIES:
            out.append(name)
        else:
            raise ValueError(f"unknown property {name!r}; "
                             f"choose from {', '.join(PROPERTY_NAMES)} or all")
    seen = set()
    unique = [n for n in out if not (n in seen or seen.add(n))]
    return tuple(unique)


# ---------------------------------------------------------------------------
# runner

@dataclass(frozen=True)
class Violation:
    prop: str
    seed: int
    trial: int
    graph_doc: dict
    detail: str

    def as_doc(self) -> dict:
        return {
            "property": self.prop,
            "seed": self.seed,
            "trial": self.trial,
            "detail": self.detail,
            "graph": self.graph_doc,
        }


@dataclass(frozen=True)
class FuzzReport:
    seed: int
    trials: int
    properties: tuple[str, ...]
    checked: int
    skipped: int
    violation: Violation | None

    @property
    def ok(self) -> bool:
        return self.violation is None

    def as_doc(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "properties": list(self.properties),
            "checked": self.checked,
            "skipped": self.skipped,
            "ok": self.ok,
            "violation": self.violation.as_doc() if self.violation else None,
        }


def _stream(seed: int, trial: int, name: str) -> random.Random:
    return random.Random(f"{seed}:{trial}:{name}")


def check_graph(g: RealGraph, names, seed: int, trial: int,
                budget: int | None) -> tuple[int, int, tuple[str, str] | None]:
    """Run the named properties; returns (checked, skipped, first failure)."""
    checked = skipped = 0
    for name in names:
        try:
            detail = _PROPERTIES[name](g, _stream(seed, trial, name), budget)
        except _SkipTrial:
            skipped += 1
            continue
        checked += 1
        if detail is not None:
            return checked, skipped, (name, detail)
    return checked, skipped, None


def _restricted(g: RealGraph, keep_vertices: set[str],
                keep_edges: set[str]) -> RealGraph | None:
    if not keep_vertices:
        return None
    ends = {e: g.ends(e) for e in keep_edges}
    sv = {v: g.sigma_v(v) for v in keep_vertices}
    se = {e: g.sigma_e(e) for e in keep_edges}
    try:
        return validate(sorted(keep_vertices), ends, sv, se)
    except GraphValidationError:
        return None


def shrink(g: RealGraph, still_fails) -> RealGraph:
    """Greedy minimization: drop conjugation orbits of edges, then vertices,
    as long as the graph stays valid and the failure persists."""
    changed = True
    while changed:
        changed = False
        for e in g.edges:
            orbit = {e, g.sigma_e(e)}
            cand = _restricted(g, set(g.vertices), set(g.edges) - orbit)
            if cand is not None and still_fails(cand):
                g = cand
                changed = True
                break
        if changed:
            continue
        for v in g.vertices:
            orbit = {v, g.sigma_v(v)}
            keep_v = set(g.vertices) - orbit
            keep_e = {e for e in g.edges
                      if not (set(g.ends(e)) & orbit)}
            cand = _restricted(g, keep_v, keep_e)
            if cand is not None and still_fails(cand):
                g = cand
                changed = True
                break
    return g


def _run_one(seed: int, trial: int, names, max_vertices: int, max_edges: int,
             profile: str, budget: int | None
             ) -> tuple[int, int, int, tuple[str, str] | None]:
    g = random_real_graph(seed * 1_000_000 + trial, max_vertices, max_edges,
                          profile)
    checked, skipped, failure = check_graph(g, names, seed, trial, budget)
    return trial, checked, skipped, failure


def run_trials(seed: int, trials: int, max_vertices: int = 10,
               max_edges: int = 16, properties=("all",), jobs: int = 1,
               budget: int | None = None,
               profile: str = "default") -> FuzzReport:
    """Fuzz the selected properties; stops at the first violation (after
    minimizing it) and reports totals otherwise."""
    names = expand_properties(properties)
    args = [(seed, i, names, max_vertices, max_edges, profile, budget)
            for i in range(trials)]
    results: list[tuple[int, int, int, tuple[str, str] | None]]
    if jobs > 1:
        try:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_run_one_star, args, chunksize=16))
        except (OSError, PermissionError, BrokenProcessPool):
            results = [_run_one(*a) for a in args]
    else:
        results = [_run_one(*a) for a in args]
    results.sort()
    checked = sum(r[1] for r in results)
    skipped = sum(r[2] for r in results)
    violation = None
    for trial, _, _, failure in results:
        if failure is None:
            continue
        name, _ = failure
        g = random_real_graph(seed * 1_000_000 + trial, max_vertices,
                              max_edges, profile)

        def still_fails(h: RealGraph) -> bool:
            try:
                return _PROPERTIES[name](h, _stream(seed, trial, name),
                                         budget) is not None
            except _SkipTrial:
                return False

        small = shrink(g, still_fails)
        detail = _PROPERTIES[name](small, _stream(seed, trial, name), budget)
        violation = Violation(name, seed, trial, graph_to_doc(small),
                              detail if detail is not None else failure[1])
        break
    return FuzzReport(seed, trials, names, checked, skipped, violation)


def _run_one_star(args) -> tuple[int, int, int, tuple[str, str] | None]:
    return _run_one(*args)
