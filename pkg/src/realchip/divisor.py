"""Divisors, chip-firing and rank on a RealGraph.

A divisor is an integer-valued function on vertices; the Laplacian of an
integer potential f is Delta(f)(v) = sum over edges at v of f(w) - f(v),
loops contributing nothing and parallel edges each counting once.  Two
divisors are linearly equivalent when they differ by such a Laplacian.

Reduction to the unique q-reduced representative (nonnegative away from q,
no subset avoiding q can fire without going negative) is the canonical
form used to decide equivalence; the burning search doubles as the
reducedness test.  Linear systems and ranks are computed by exhaustive
sweeps over effective divisors, guarded by a budget.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterator, Mapping

from .errors import DanglingIncidence, EnumerationBudgetExceeded
from .graph import RealGraph

__all__ = [
    "Divisor",
    "PotentialFunction",
    "ReducedForm",
    "laplacian",
    "q_reduce",
    "is_q_reduced",
    "linearly_equivalent",
    "complete_linear_system",
    "effective_divisors",
    "rank",
    "canonical_divisor",
    "divisor_to_doc",
    "divisor_from_doc",
    "potential_to_doc",
    "potential_from_doc",
    "resolve_budget",
    "DEFAULT_ENUMERATION_BUDGET",
]

DEFAULT_ENUMERATION_BUDGET = 10_000_000


def resolve_budget(budget: int | None = None) -> int:
    """Explicit argument, else the REALCHIP_BUDGET env var, else the default."""
    if budget is not None:
        return int(budget)
    env = os.environ.get("REALCHIP_BUDGET")
    return int(env) if env else DEFAULT_ENUMERATION_BUDGET


class Divisor:
    """An integer chip count per vertex; zero entries are not stored."""

    __slots__ = ("graph", "_coeffs")

    def __init__(self, graph: RealGraph, coeffs: Mapping[str, int] | None = None):
        self.graph = graph
        vset = set(graph.vertices)
        cleaned: dict[str, int] = {}
        for v, c in (coeffs or {}).items():
            if v not in vset:
                raise KeyError(f"divisor supported on unknown vertex {v!r}")
            c = int(c)
            if c:
                cleaned[v] = c
        self._coeffs = cleaned

    def __getitem__(self, v: str) -> int:
        return self._coeffs.get(v, 0)

    def coeffs(self) -> dict[str, int]:
        """Nonzero coefficients, sorted by vertex id."""
        return {v: self._coeffs[v] for v in sorted(self._coeffs)}

    def support(self) -> tuple[str, ...]:
        return tuple(sorted(self._coeffs))

    def degree(self) -> int:
        return sum(self._coeffs.values())

    def is_effective(self) -> bool:
        return all(c >= 0 for c in self._coeffs.values())

    def __add__(self, other: "Divisor") -> "Divisor":
        if self.graph != other.graph:
            raise ValueError("divisors live on different graphs")
        out = dict(self._coeffs)
        for v, c in other._coeffs.items():
            out[v] = out.get(v, 0) + c
        return Divisor(self.graph, out)

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __neg__(self) -> "Divisor":
        return Divisor(self.graph, {v: -c for v, c in self._coeffs.items()})

    def __mul__(self, k: int) -> "Divisor":
        return Divisor(self.graph, {v: k * c for v, c in self._coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Divisor):
            return NotImplemented
        return self.graph == other.graph and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(frozenset(self._coeffs.items()))

    def __repr__(self) -> str:
        inner = " + ".join(f"{c}*{v}" for v, c in sorted(self._coeffs.items()))
        return f"Divisor({inner or '0'})"

    def _array(self) -> list[int]:
        return [self._coeffs.get(v, 0) for v in self.graph.vertices]

    @classmethod
    def _from_array(cls, graph: RealGraph, arr: list[int]) -> "Divisor":
        return cls(graph, {v: arr[i] for i, v in enumerate(graph.vertices) if arr[i]})


class PotentialFunction:
    """An integer-valued function on vertices (default value 0)."""

    __slots__ = ("graph", "_values")

    def __init__(self, graph: RealGraph, values: Mapping[str, int] | None = None):
        self.graph = graph
        vset = set(graph.vertices)
        cleaned: dict[str, int] = {}
        for v, c in (values or {}).items():
            if v not in vset:
                raise KeyError(f"potential defined on unknown vertex {v!r}")
            c = int(c)
            if c:
                cleaned[v] = c
        self._values = cleaned

    def __getitem__(self, v: str) -> int:
        return self._values.get(v, 0)

    def values(self) -> dict[str, int]:
        return {v: self._values[v] for v in sorted(self._values)}

    def __add__(self, other: "PotentialFunction") -> "PotentialFunction":
        out = dict(self._values)
        for v, c in other._values.items():
            out[v] = out.get(v, 0) + c
        return PotentialFunction(self.graph, out)

    def __sub__(self, other: "PotentialFunction") -> "PotentialFunction":
        return self + (-other)

    def __neg__(self) -> "PotentialFunction":
        return PotentialFunction(self.graph, {v: -c for v, c in self._values.items()})

    def __mul__(self, k: int) -> "PotentialFunction":
        return PotentialFunction(self.graph, {v: k * c for v, c in self._values.items()})

    __rmul__ = __mul__

    def shift(self, c: int) -> "PotentialFunction":
        return PotentialFunction(self.graph,
                                 {v: self[v] + c for v in self.graph.vertices})

    def pointwise_max(self, other: "PotentialFunction") -> "PotentialFunction":
        return PotentialFunction(self.graph,
                                 {v: max(self[v], other[v]) for v in self.graph.vertices})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PotentialFunction):
            return NotImplemented
        return self.graph == other.graph and self._values == other._values

    def __hash__(self) -> int:
        return hash(frozenset(self._values.items()))

    def __repr__(self) -> str:
        return f"PotentialFunction({self.values()})"

    def _array(self) -> list[int]:
        return [self._values.get(v, 0) for v in self.graph.vertices]

    @classmethod
    def _from_array(cls, graph: RealGraph, arr: list[int]) -> "PotentialFunction":
        return cls(graph, {v: arr[i] for i, v in enumerate(graph.vertices) if arr[i]})


def laplacian(graph: RealGraph, f: PotentialFunction) -> Divisor:
    """Delta(f)(v) = sum over non-loop edges {v,w} of f(w) - f(v)."""
    if f.graph != graph:
        raise ValueError("potential lives on a different graph")
    out = {v: 0 for v in graph.vertices}
    for e in graph.edges:
        a, b = graph.ends(e)
        if a == b:
            continue
        fa, fb = f[a], f[b]
        out[a] += fb - fa
        out[b] += fa - fb
    return Divisor(graph, out)


@dataclass(frozen=True)
class ReducedForm:
    """The q-reduced representative of a divisor class."""

    base_vertex: str
    divisor: Divisor


def _bfs_dist(graph: RealGraph, qi: int) -> list[int]:
    n = len(graph.vertices)
    dist = [-1] * n
    dist[qi] = 0
    frontier = [qi]
    while frontier:
        nxt = []
        for i in frontier:
            for j, _ in graph._adj[i]:
                if dist[j] < 0:
                    dist[j] = dist[i] + 1
                    nxt.append(j)
        frontier = nxt
    return dist


def _burn(graph: RealGraph, d: list[int], qi: int) -> tuple[list[int], list[int]]:
    """Dhar burning from q.

    Returns (burned flags, burnt-edge counts).  The unburnt set, when
    nonempty, is the largest subset avoiding q that can fire without any
    member going negative.
    """
    n = len(d)
    burned = [False] * n
    burned[qi] = True
    cnt = [0] * n
    stack = [qi]
    while stack:
        b = stack.pop()
        for j, m in graph._adj[b]:
            if not burned[j]:
                cnt[j] += m
                if cnt[j] > d[j]:
                    burned[j] = True
                    stack.append(j)
    return burned, cnt


def _reduce_array(graph: RealGraph, arr: list[int], qi: int) -> tuple[list[int], list[int]]:
    n = len(arr)
    d = list(arr)
    f = [0] * n
    dist = _bfs_dist(graph, qi)
    top = max(dist)
    # stage one: clear debt away from q, farthest shell first; firing the
    # ball below shell k only feeds shell k and only drains inside the ball
    for k in range(top, 0, -1):
        need = 0
        for v in range(n):
            if dist[v] == k and d[v] < 0:
                feed = sum(m for w, m in graph._adj[v] if dist[w] == k - 1)
                need = max(need, (-d[v] + feed - 1) // feed)
        if need == 0:
            continue
        for v in range(n):
            if dist[v] <= k - 1:
                f[v] += need
                if dist[v] == k - 1:
                    out = sum(m for w, m in graph._adj[v] if dist[w] == k)
                    d[v] -= need * out
            elif dist[v] == k:
                inc = sum(m for w, m in graph._adj[v] if dist[w] == k - 1)
                d[v] += need * inc
    # stage two: repeatedly fire the maximal unburnt set until burning
    # from q consumes everything
    while True:
        burned, cnt = _burn(graph, d, qi)
        if all(burned):
            break
        inflow = [0] * n
        for v in range(n):
            if burned[v]:
                gain = sum(m for w, m in graph._adj[v] if not burned[w])
                if gain:
                    inflow[v] = gain
        for v in range(n):
            if not burned[v]:
                d[v] -= cnt[v]
                f[v] += 1
            elif inflow[v]:
                d[v] += inflow[v]
    base = f[qi]
    if base:
        f = [x - base for x in f]
    return d, f


def q_reduce(d: Divisor, q: str | None = None) -> tuple[ReducedForm, PotentialFunction]:
    """The unique q-reduced divisor equivalent to d, plus a witness f.

    d + Delta(f) equals the reduced form; f is normalized to vanish at q.
    q defaults to the least vertex id.
    """
    graph = d.graph
    if q is None:
        q = graph.vertices[0]
    qi = graph._vindex[q]
    arr, farr = _reduce_array(graph, d._array(), qi)
    return (ReducedForm(q, Divisor._from_array(graph, arr)),
            PotentialFunction._from_array(graph, farr))


def is_q_reduced(d: Divisor, q: str | None = None) -> bool:
    """Nonnegative away from q, and burning from q consumes every vertex."""
    graph = d.graph
    if q is None:
        q = graph.vertices[0]
    qi = graph._vindex[q]
    arr = d._array()
    if any(arr[i] < 0 for i in range(len(arr)) if i != qi):
        return False
    burned, _ = _burn(graph, arr, qi)
    return all(burned)


def linearly_equivalent(d1: Divisor, d2: Divisor) -> PotentialFunction | None:
    """A witness f with d1 + Delta(f) = d2, or None.

    Decided by comparing reduced forms at the least vertex.
    """
    if d1.graph != d2.graph:
        raise ValueError("divisors live on different graphs")
    if d1.degree() != d2.degree():
        return None
    r1, f1 = q_reduce(d1)
    r2, f2 = q_reduce(d2)
    if r1.divisor != r2.divisor:
        return None
    return f1 - f2


def effective_divisors(graph: RealGraph, degree: int,
                       budget: int | None = None) -> Iterator[Divisor]:
    """All effective divisors of the given degree, in lexicographic order."""
    if degree < 0:
        return
    n = len(graph.vertices)
    total = math.comb(degree + n - 1, n - 1)
    if total > resolve_budget(budget):
        raise EnumerationBudgetExceeded(
            f"{total} effective divisors of degree {degree} exceed the budget")
    verts = graph.vertices

    def rec(i: int, remaining: int, acc: dict[str, int]) -> Iterator[Divisor]:
        if i == n - 1:
            if remaining:
                acc[verts[i]] = remaining
            yield Divisor(graph, acc)
            acc.pop(verts[i], None)
            return
        for c in range(remaining + 1):
            if c:
                acc[verts[i]] = c
            yield from rec(i + 1, remaining - c, acc)
            acc.pop(verts[i], None)

    yield from rec(0, degree, {})


def complete_linear_system(d: Divisor, budget: int | None = None) -> tuple[Divisor, ...]:
    """Every effective divisor linearly equivalent to d, sorted."""
    if d.degree() < 0:
        return ()
    target = q_reduce(d)[0].divisor
    out = []
    for e in effective_divisors(d.graph, d.degree(), budget):
        if q_reduce(e)[0].divisor == target:
            out.append(e)
    verts = d.graph.vertices
    out.sort(key=lambda dv: tuple(dv[v] for v in verts))
    return tuple(out)


def _reduced_is_effective(d: Divisor) -> bool:
    graph = d.graph
    arr, _ = _reduce_array(graph, d._array(), 0)
    return arr[0] >= 0


def rank(d: Divisor, budget: int | None = None) -> int:
    """Baker-Norine rank.

    -1 when the class has no effective member; otherwise the largest r such
    that removing any effective divisor of degree r leaves an effective
    class.  Each level r sweeps all effective divisors of that degree.
    """
    if not _reduced_is_effective(d):
        return -1
    deg = d.degree()
    r = 0
    while r + 1 <= deg:
        if all(_reduced_is_effective(d - e)
               for e in effective_divisors(d.graph, r + 1, budget)):
            r += 1
        else:
            break
    return r


def canonical_divisor(graph: RealGraph) -> Divisor:
    """valence(v) - 2 at each vertex, loops counting twice; degree 2g - 2."""
    return Divisor(graph, {v: graph.valence(v) - 2 for v in graph.vertices})


# ---------------------------------------------------------------------------
# JSON interchange: {"vertex_id": coefficient} with zero entries omitted

def divisor_to_doc(d: Divisor) -> dict:
    return d.coeffs()


def divisor_from_doc(graph: RealGraph, doc: Mapping) -> Divisor:
    try:
        return Divisor(graph, {str(v): int(c) for v, c in doc.items()})
    except KeyError as exc:
        raise DanglingIncidence(str(exc.args[0])) from None
    except AttributeError:
        raise DanglingIncidence(
            f"divisor document must be an object, got {type(doc).__name__}") from None


def potential_to_doc(f: PotentialFunction) -> dict:
    return f.values()


def potential_from_doc(graph: RealGraph, doc: Mapping) -> PotentialFunction:
    try:
        return PotentialFunction(graph, {str(v): int(c) for v, c in doc.items()})
    except KeyError as exc:
        raise DanglingIncidence(str(exc.args[0])) from None
