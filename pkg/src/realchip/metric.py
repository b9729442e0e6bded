"""Rational metric graphs with real structure.

A metric graph is presented by a model: a RealGraph whose edges carry
positive rational lengths, constant on conjugation orbits.  The stored
end order of each edge is its orientation; offsets are measured from the
first end.  The involution extends over edge interiors in three ways:
conjugate edge pairs map (e, t) to (sigma e, t) (their stored orientations
are required to match under sigma), fixed edges with fixed ends are
pointwise fixed, and fixed edges across a conjugate vertex pair carry the
reflection t -> length - t, so their only fixed point is the midpoint.

All divisor theory is computed operationally: scale lengths by the least
common denominator L, subdivide each edge into unit pieces (transporting
the involution exactly as graph subdivision does), and run the finite
graph machinery on the unit model.  A potential f on the unit model
corresponds to the function f/L on the metric graph, linearly interpolated
with integer slopes.  Stability of the answers under refinement (L versus
2L and 3L) is covered by the test suite rather than assumed silently.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Mapping

from .builders import _subdivide_engine
from .divisor import Divisor, PotentialFunction, linearly_equivalent, rank
from .errors import (
    BudgetExceeded,
    DanglingIncidence,
    IncompatibleOrientation,
    IrrationalPoint,
    NotMMetricGraph,
    NotReal,
    NotStrongMGraph,
    PreconditionViolated,
)
from .graph import InvariantReport, RealGraph, graph_from_doc, graph_to_doc, invariants
from .realdivisor import (
    ParitySignature,
    find_real_g12,
    is_M_graph,
    is_strong_M_graph,
    real_rank,
    totally_real_reduction,
)

__all__ = [
    "QPoint",
    "vertex_point",
    "edge_point",
    "QMetricGraph",
    "QDivisor",
    "ModelReduction",
    "MetricWitness",
    "unit_metric",
    "metric_invariants",
    "is_M_metric",
    "is_strong_M_metric",
    "reduce_to_model",
    "metric_equivalent",
    "metric_rank",
    "metric_real_rank",
    "metric_parity_signature",
    "metric_totally_real_reduction",
    "metric_find_real_g12",
    "qpoint_to_doc",
    "qpoint_from_doc",
    "qdivisor_to_doc",
    "qdivisor_from_doc",
    "metric_to_doc",
    "metric_from_doc",
    "metric_to_json",
    "metric_from_json",
    "resolve_model_budget",
    "DEFAULT_MODEL_BUDGET",
]

DEFAULT_MODEL_BUDGET = 100_000


def resolve_model_budget(budget: int | None = None) -> int:
    """Explicit argument, else the REALCHIP_BUDGET env var, else the default."""
    if budget is not None:
        return int(budget)
    env = os.environ.get("REALCHIP_BUDGET")
    return int(env) if env else DEFAULT_MODEL_BUDGET


def _as_fraction(value, what: str) -> Fraction:
    if isinstance(value, float):
        raise IrrationalPoint(f"{what} must be rational, got float {value!r}")
    try:
        return Fraction(value)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise IrrationalPoint(f"{what} is not a rational number: {value!r}") from exc


@total_ordering
class QPoint:
    """A vertex of the model, or a point strictly inside an edge.

    Interior points are (edge id, offset) with the offset measured along
    the edge's stored orientation.
    """

    __slots__ = ("kind", "id", "offset")

    def __init__(self, kind: str, id: str, offset: Fraction = Fraction(0)):
        if kind not in ("vertex", "edge"):
            raise PreconditionViolated(f"unknown point kind {kind!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "id", id)
        object.__setattr__(self, "offset", offset)

    def __setattr__(self, *_):
        raise AttributeError("QPoint is immutable")

    def _key(self):
        return (self.kind, self.id, self.offset)

    def __eq__(self, other):
        return isinstance(other, QPoint) and self._key() == other._key()

    def __lt__(self, other):
        if not isinstance(other, QPoint):
            return NotImplemented
        return self._key() < other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.kind == "vertex":
            return f"QPoint({self.id!r})"
        return f"QPoint({self.id!r}, {self.offset})"


def vertex_point(v: str) -> QPoint:
    return QPoint("vertex", v)


def edge_point(e: str, offset) -> QPoint:
    return QPoint("edge", e, _as_fraction(offset, f"offset on edge {e!r}"))


class QMetricGraph:
    """A RealGraph model with positive rational edge lengths.

    Fixed edges whose ends form a conjugate pair (the isolated real edges
    of the model) carry the reflection involution on their interior; they
    are the reflected edges.  Lengths must be constant on conjugation
    orbits, and conjugate edge pairs must store sigma-matching end orders.
    """

    __slots__ = ("model", "_lengths", "_reflected")

    def __init__(self, model: RealGraph, lengths: Mapping[str, object]):
        self.model = model
        parsed: dict[str, Fraction] = {}
        for e in model.edges:
            if e not in lengths:
                raise DanglingIncidence(f"edge {e!r} has no length")
            val = _as_fraction(lengths[e], f"length of edge {e!r}")
            if val <= 0:
                raise PreconditionViolated(f"length of edge {e!r} must be positive")
            parsed[e] = val
        for e in lengths:
            if e not in parsed:
                raise DanglingIncidence(f"length given for unknown edge {e!r}")
        for e in model.edges:
            mate = model.sigma_e(e)
            if parsed[e] != parsed[mate]:
                raise PreconditionViolated(
                    f"conjugate edges {e!r}, {mate!r} have different lengths")
            if mate != e:
                a, b = model.ends(e)
                if model.ends(mate) != (model.sigma_v(a), model.sigma_v(b)):
                    raise IncompatibleOrientation(
                        f"stored ends of {mate!r} are not the sigma image of "
                        f"the stored ends of {e!r}")
        self._lengths = parsed
        self._reflected = frozenset(e for e in model.edges
                                    if model.is_isolated_real_edge(e))

    def length(self, e: str) -> Fraction:
        return self._lengths[e]

    @property
    def reflected_edges(self) -> frozenset[str]:
        return self._reflected

    def is_reflected(self, e: str) -> bool:
        return e in self._reflected

    def genus(self) -> int:
        return self.model.genus()

    def total_length(self) -> Fraction:
        return sum(self._lengths.values(), Fraction(0))

    def check_point(self, p: QPoint) -> QPoint:
        """Validate a point against this graph and return it."""
        if p.kind == "vertex":
            if p.id not in self.model._vindex:
                raise DanglingIncidence(f"unknown vertex {p.id!r}")
            return p
        if p.id not in self._lengths:
            raise DanglingIncidence(f"unknown edge {p.id!r}")
        if not isinstance(p.offset, Fraction):
            raise IrrationalPoint(f"offset on {p.id!r} must be a Fraction")
        if not 0 < p.offset < self._lengths[p.id]:
            raise PreconditionViolated(
                f"offset {p.offset} is outside the open edge {p.id!r} "
                f"of length {self._lengths[p.id]}")
        return p

    def conjugate_point(self, p: QPoint) -> QPoint:
        self.check_point(p)
        if p.kind == "vertex":
            return vertex_point(self.model.sigma_v(p.id))
        mate = self.model.sigma_e(p.id)
        if mate != p.id:
            return QPoint("edge", mate, p.offset)
        if p.id in self._reflected:
            return QPoint("edge", p.id, self._lengths[p.id] - p.offset)
        return p

    def is_real_point(self, p: QPoint) -> bool:
        return self.conjugate_point(p) == p

    def __eq__(self, other):
        if not isinstance(other, QMetricGraph):
            return NotImplemented
        return self.model == other.model and self._lengths == other._lengths

    def __hash__(self):
        return hash((self.model, tuple(sorted(self._lengths.items()))))

    def __repr__(self):
        return (f"QMetricGraph({len(self.model.vertices)} vertices, "
                f"{len(self.model.edges)} edges, genus {self.genus()})")


def unit_metric(model: RealGraph) -> QMetricGraph:
    """The metric graph giving every edge length 1."""
    return QMetricGraph(model, {e: Fraction(1) for e in model.edges})


class QDivisor:
    """An integer combination of rational points of a metric graph."""

    __slots__ = ("graph", "_coeffs")

    def __init__(self, graph: QMetricGraph,
                 coeffs: Mapping[QPoint, int] | Iterable[tuple[QPoint, int]] = ()):
        self.graph = graph
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        cleaned: dict[QPoint, int] = {}
        for p, c in items:
            graph.check_point(p)
            c = int(c)
            if c:
                cleaned[p] = cleaned.get(p, 0) + c
                if not cleaned[p]:
                    del cleaned[p]
        self._coeffs = cleaned

    def __getitem__(self, p: QPoint) -> int:
        return self._coeffs.get(p, 0)

    def support(self) -> tuple[QPoint, ...]:
        return tuple(sorted(self._coeffs))

    def coeffs(self) -> dict[QPoint, int]:
        return {p: self._coeffs[p] for p in self.support()}

    def degree(self) -> int:
        return sum(self._coeffs.values())

    def is_effective(self) -> bool:
        return all(c >= 0 for c in self._coeffs.values())

    def conjugate(self) -> "QDivisor":
        return QDivisor(self.graph,
                        [(self.graph.conjugate_point(p), c)
                         for p, c in self._coeffs.items()])

    def is_real(self) -> bool:
        return self.conjugate() == self

    def is_totally_real(self) -> bool:
        return self.is_real() and all(self.graph.is_real_point(p)
                                      for p in self._coeffs)

    def __add__(self, other: "QDivisor") -> "QDivisor":
        if self.graph != other.graph:
            raise ValueError("divisors live on different metric graphs")
        out = dict(self._coeffs)
        for p, c in other._coeffs.items():
            out[p] = out.get(p, 0) + c
        return QDivisor(self.graph, out)

    def __neg__(self) -> "QDivisor":
        return QDivisor(self.graph, {p: -c for p, c in self._coeffs.items()})

    def __sub__(self, other: "QDivisor") -> "QDivisor":
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, QDivisor):
            return NotImplemented
        return self.graph == other.graph and self._coeffs == other._coeffs

    def __hash__(self):
        return hash(frozenset(self._coeffs.items()))

    def __repr__(self):
        inner = " + ".join(f"{c}*{p!r}" for p, c in sorted(self._coeffs.items(),
                                                           key=lambda t: t[0]))
        return f"QDivisor({inner or '0'})"


def metric_invariants(gamma: QMetricGraph) -> InvariantReport:
    """The invariants of the metric graph, read off its model.

    Reflected edges count through the isolated-real-edge channel: each
    contributes its midpoint as one extra component of the real locus.
    """
    return invariants(gamma.model)


def is_M_metric(gamma: QMetricGraph) -> bool:
    """s = g + 1; reflected midpoints count toward s."""
    rep = metric_invariants(gamma)
    return rep.s == rep.genus + 1


def is_strong_M_metric(gamma: QMetricGraph) -> bool:
    """The real locus, midpoints included, has g + 1 components."""
    rep = metric_invariants(gamma)
    return rep.s_prime + rep.isolated_real_edge_count == rep.genus + 1


@dataclass(frozen=True)
class ModelReduction:
    """A unit-length subdivided model of a metric graph.

    ``scale`` is the common denominator L: each edge of length l becomes
    L*l unit edges, and the metric point at offset t corresponds to the
    chain vertex at position L*t.  ``push``/``pull`` translate divisors;
    vertex ids of the subdivided graph map back to points via ``as_point``.
    """

    metric: QMetricGraph
    scale: int
    graph: RealGraph
    _chains: Mapping[str, tuple[str, ...]]
    _interiors: Mapping[str, tuple[str, ...]]
    _orientation: Mapping[str, tuple[str, str]]
    _vertex_point: Mapping[str, QPoint]

    def units(self, e: str) -> int:
        return len(self._chains[e])

    def to_vertex(self, p: QPoint) -> str:
        """The subdivided vertex at a lattice point."""
        self.metric.check_point(p)
        if p.kind == "vertex":
            return p.id
        pos = p.offset * self.scale
        if pos.denominator != 1:
            raise PreconditionViolated(
                f"point {p!r} is not on the 1/{self.scale} lattice")
        k = int(pos)
        n = self.units(p.id)
        if self._orientation[p.id] != self.metric.model.ends(p.id):
            k = n - k
        return self._interiors[p.id][k - 1]

    def as_point(self, vertex: str) -> QPoint:
        """The metric point a subdivided vertex stands at."""
        try:
            return self._vertex_point[vertex]
        except KeyError:
            raise DanglingIncidence(f"unknown subdivided vertex {vertex!r}") from None

    def push(self, d: QDivisor) -> Divisor:
        if d.graph != self.metric:
            raise PreconditionViolated("divisor lives on a different metric graph")
        return Divisor(self.graph,
                       {self.to_vertex(p): c for p, c in d.coeffs().items()})

    def pull(self, d: Divisor) -> QDivisor:
        if d.graph != self.graph:
            raise PreconditionViolated("divisor lives on a different model")
        return QDivisor(self.metric,
                        [(self.as_point(v), c) for v, c in d.coeffs().items()])


def reduce_to_model(gamma: QMetricGraph, supports: Iterable[QPoint] = (),
                    multiplier: int = 1, budget: int | None = None) -> ModelReduction:
    """Subdivide into unit edges fine enough to see the given points.

    The scale L is the least common denominator of all edge lengths and
    all support offsets, times the multiplier (refinement tests use 2 or
    3).  Raises BudgetExceeded when the unit model would have more than
    the configured number of edges.
    """
    pts = [gamma.check_point(p) for p in supports]
    if multiplier < 1:
        raise PreconditionViolated(f"multiplier must be >= 1, got {multiplier}")
    denoms = [gamma.length(e).denominator for e in gamma.model.edges]
    denoms += [p.offset.denominator for p in pts if p.kind == "edge"]
    scale = multiplier * math.lcm(*denoms) if denoms else multiplier
    # a loop must split into at least two unit edges: a unit loop would hide
    # its interior from the chip-firing Laplacian, which skips loops
    if any(gamma.model.ends(e)[0] == gamma.model.ends(e)[1]
           and gamma.length(e) * scale == 1 for e in gamma.model.edges):
        scale *= 2
    total_units = sum(int(gamma.length(e) * scale) for e in gamma.model.edges)
    cap = resolve_model_budget(budget)
    if total_units > cap:
        raise BudgetExceeded(
            f"unit model needs {total_units} edges, over the cap of {cap}")
    parts = {e: int(gamma.length(e) * scale) for e in gamma.model.edges}
    result = _subdivide_engine(gamma.model, parts)
    vertex_point_map: dict[str, QPoint] = {
        v: vertex_point(v) for v in gamma.model.vertices}
    for e in gamma.model.edges:
        n = parts[e]
        same = result.orientation[e] == gamma.model.ends(e)
        for j, u in enumerate(result.interiors[e], start=1):
            k = j if same else n - j
            vertex_point_map[u] = QPoint("edge", e, Fraction(k, scale))
    return ModelReduction(gamma, scale, result.graph, result.chains,
                          result.interiors, result.orientation,
                          vertex_point_map)


def _real_reduction(gamma: QMetricGraph, supports: Iterable[QPoint],
                    multiplier: int = 1,
                    budget: int | None = None) -> ModelReduction:
    """A reduction whose reflected chains all have even length, so every
    midpoint is a lattice vertex and the unit model has no isolated real
    edges."""
    red = reduce_to_model(gamma, supports, multiplier, budget)
    if any(red.units(e) % 2 for e in gamma.reflected_edges):
        red = reduce_to_model(gamma, supports, 2 * multiplier, budget)
    return red


@dataclass(frozen=True)
class MetricWitness:
    """A rational function on the metric graph with integer slopes.

    Stored as an integer potential on a unit model at scale L; the value
    at a point is f/L, linearly interpolated inside unit cells.
    """

    reduction: ModelReduction
    potential: PotentialFunction

    def value_at(self, p: QPoint) -> Fraction:
        metric = self.reduction.metric
        metric.check_point(p)
        f = self.potential
        L = self.reduction.scale
        if p.kind == "vertex":
            return Fraction(f[p.id], L)
        n = self.reduction.units(p.id)
        pos = p.offset * L
        same = self.reduction._orientation[p.id] == metric.model.ends(p.id)
        if not same:
            pos = n - pos
        j = int(pos)  # cell index along the chain
        frac = pos - j
        nodes = ([self.reduction._orientation[p.id][0]]
                 + list(self.reduction._interiors[p.id])
                 + [self.reduction._orientation[p.id][1]])
        if frac == 0:
            return Fraction(f[nodes[j]], L)
        lo, hi = f[nodes[j]], f[nodes[j + 1]]
        return Fraction(lo, L) + Fraction(hi - lo, L) * frac

    def is_real(self) -> bool:
        """True when the function is invariant under conjugation of points."""
        red = self.reduction
        g = red.graph
        f = self.potential
        return all(f[v] == f[g.sigma_v(v)] for v in g.vertices)

    def as_doc(self) -> dict:
        red = self.reduction
        rows = []
        for v in red.graph.vertices:
            p = red.as_point(v)
            rows.append([qpoint_to_doc(p), str(self.value_at(p))])
        rows.sort(key=lambda r: (r[0][0], r[0][1], r[0][2] if len(r[0]) > 2 else ""))
        return {"scale": red.scale, "values": rows}


def metric_equivalent(d1: QDivisor, d2: QDivisor,
                      budget: int | None = None) -> MetricWitness | None:
    """A witness function with d1 + principal part = d2, or None.

    Both divisors are pushed to a common unit model and compared there.
    """
    if d1.graph != d2.graph:
        raise PreconditionViolated("divisors live on different metric graphs")
    red = reduce_to_model(d1.graph, list(d1.support()) + list(d2.support()),
                          budget=budget)
    f = linearly_equivalent(red.push(d1), red.push(d2))
    if f is None:
        return None
    return MetricWitness(red, f)


def metric_rank(d: QDivisor, budget: int | None = None) -> int:
    """Baker-Norine rank computed on a unit model of the metric graph."""
    red = reduce_to_model(d.graph, d.support(), budget=budget)
    return rank(red.push(d), budget)


def metric_real_rank(d: QDivisor, budget: int | None = None) -> int:
    """Real rank computed on an even unit model (midpoints are vertices)."""
    if not d.is_real():
        raise NotReal(f"metric_real_rank needs a real divisor, got {d!r}")
    red = _real_reduction(d.graph, d.support(), budget=budget)
    return real_rank(red.push(d), budget)


def metric_parity_signature(d: QDivisor) -> ParitySignature:
    """Parity of the divisor on each component of the real locus.

    Components are the model's real-locus components (by least vertex)
    followed by one midpoint component per reflected edge (by edge id),
    labelled "mid(edge)".  Interior support on a fixed pointwise-real edge
    counts toward the component holding that edge's ends.
    """
    if not d.is_real():
        raise NotReal(f"parity signature needs a real divisor, got {d!r}")
    gamma = d.graph
    model = gamma.model
    rep = invariants(model)
    comps = rep.components_of_real_locus
    names = [tuple(sorted(c.vertex_subset)) for c in comps]
    totals = [0] * len(comps)
    vertex_comp: dict[str, int] = {}
    for i, c in enumerate(comps):
        for v in c.vertex_subset:
            vertex_comp[v] = i
    reflected = sorted(gamma.reflected_edges)
    mid_totals = {e: 0 for e in reflected}
    for p, c in d.coeffs().items():
        if not gamma.is_real_point(p):
            continue
        if p.kind == "vertex":
            totals[vertex_comp[p.id]] += c
        elif p.id in mid_totals:
            mid_totals[p.id] += c
        else:
            # interior of a pointwise-real edge: both ends real, same component
            totals[vertex_comp[model.ends(p.id)[0]]] += c
    names += [(f"mid({e})",) for e in reflected]
    parities = [t % 2 for t in totals] + [mid_totals[e] % 2 for e in reflected]
    return ParitySignature(tuple(names), tuple(parities))


def metric_totally_real_reduction(d: QDivisor, budget: int | None = None
                                  ) -> tuple[QDivisor, MetricWitness]:
    """A totally real effective divisor equivalent to d, with witness.

    Needs s = g + 1 (midpoints included) and a real effective divisor;
    runs the graph reduction on an even unit model and pulls back.
    """
    gamma = d.graph
    if not is_M_metric(gamma):
        rep = metric_invariants(gamma)
        raise NotMMetricGraph(
            f"needs s = g + 1, got s = {rep.s}, g = {rep.genus}")
    red = _real_reduction(gamma, d.support(), budget=budget)
    assert is_M_graph(red.graph)
    out, f = totally_real_reduction(red.push(d))
    pulled = red.pull(out)
    assert pulled.is_totally_real()
    return pulled, MetricWitness(red, f)


def metric_find_real_g12(gamma: QMetricGraph,
                         budget: int | None = None) -> QDivisor:
    """A real degree-2 divisor of rank at least 1 on a strong M-metric graph."""
    if not is_strong_M_metric(gamma):
        rep = metric_invariants(gamma)
        raise NotStrongMGraph(
            f"the real locus has {rep.s_prime + rep.isolated_real_edge_count} "
            f"components, needs g + 1 = {rep.genus + 1}")
    red = _real_reduction(gamma, (), budget=budget)
    assert is_strong_M_graph(red.graph)
    return red.pull(find_real_g12(red.graph, budget))


# ---------------------------------------------------------------------------
# JSON interchange

def qpoint_to_doc(p: QPoint) -> list:
    if p.kind == "vertex":
        return ["vertex", p.id]
    return ["edge", p.id, str(p.offset)]


def qpoint_from_doc(doc) -> QPoint:
    try:
        kind = doc[0]
        if kind == "vertex":
            return vertex_point(str(doc[1]))
        if kind == "edge":
            return edge_point(str(doc[1]), str(doc[2]))
    except (IndexError, TypeError) as exc:
        raise DanglingIncidence(f"malformed point {doc!r}") from exc
    raise DanglingIncidence(f"unknown point kind in {doc!r}")


def qdivisor_to_doc(d: QDivisor) -> list:
    return [[qpoint_to_doc(p), c] for p, c in d.coeffs().items()]


def qdivisor_from_doc(gamma: QMetricGraph, doc) -> QDivisor:
    try:
        pairs = [(qpoint_from_doc(entry[0]), int(entry[1])) for entry in doc]
    except (IndexError, TypeError) as exc:
        raise DanglingIncidence(f"malformed divisor document: {exc}") from None
    return QDivisor(gamma, pairs)


def metric_to_doc(gamma: QMetricGraph) -> dict:
    doc = graph_to_doc(gamma.model)
    for entry in doc["edges"]:
        entry["length"] = str(gamma.length(entry["id"]))
        if gamma.is_reflected(entry["id"]):
            entry["kind"] = "reflected"
    return doc


def metric_from_doc(doc: Mapping) -> QMetricGraph:
    model = graph_from_doc(doc)
    lengths = {}
    declared: dict[str, str] = {}
    for entry in doc["edges"]:
        if "length" not in entry:
            raise DanglingIncidence(f"edge {entry['id']!r} has no length")
        lengths[str(entry["id"])] = str(entry["length"])
        if "kind" in entry:
            kind = str(entry["kind"])
            if kind not in ("reflected", "pointwise_real"):
                raise PreconditionViolated(
                    f"edge {entry['id']!r} has unknown kind {kind!r}")
            declared[str(entry["id"])] = kind
    gamma = QMetricGraph(model, lengths)
    for e, kind in declared.items():
        if (kind == "reflected") != gamma.is_reflected(e):
            raise PreconditionViolated(
                f"edge {e!r} is declared {kind!r} but the real structure "
                f"derives the opposite")
    return gamma


def metric_to_json(gamma: QMetricGraph) -> str:
    return json.dumps(metric_to_doc(gamma), sort_keys=True, indent=2)


def metric_from_json(text: str) -> QMetricGraph:
    return metric_from_doc(json.loads(text))
