"""Multigraphs carrying an involution compatible with incidence.

The central object is :class:`RealGraph`: a finite connected multigraph
(loops and parallel edges allowed) together with involutions ``sigma_v`` on
vertices and ``sigma_e`` on edges such that the ends of ``sigma_e(e)`` are
the sigma-images of the ends of ``e``.  Fixed vertices and fixed edges play
the role of real points.

Derived data: the real locus (fixed vertices plus fixed edges whose ends
are both fixed), the genus ``g = 1 + e - v``, the count ``s`` built from
isolated fixed edges and the genera of real-locus components, and the flag
``a`` recording whether some vertex can reach its conjugate while avoiding
the real locus entirely.

All iteration is in sorted id order and every object is immutable, so each
operation is deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .errors import (
    DanglingIncidence,
    Disconnected,
    GraphValidationError,
    IncompatibleInvolution,
    NotInvolutive,
)

__all__ = [
    "RealGraph",
    "PlainGraph",
    "SubgraphRef",
    "InvariantReport",
    "validate",
    "genus",
    "real_locus",
    "invariants",
    "check_invariant_bounds",
    "induced_subgraph",
    "edge_span",
    "delete_edges",
    "contract_complement",
    "genus_decomposition_check",
    "relabel",
    "from_json",
    "to_json",
    "graph_to_doc",
    "graph_from_doc",
]


class _UnionFind:
    def __init__(self, items: Iterable[str]):
        self.parent = {x: x for x in items}

    def find(self, x: str) -> str:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb

    def groups(self) -> list[frozenset[str]]:
        by_root: dict[str, set[str]] = {}
        for x in self.parent:
            by_root.setdefault(self.find(x), set()).add(x)
        return sorted((frozenset(g) for g in by_root.values()), key=min)


def _total_involution(mapping: Mapping[str, str] | None, domain: tuple[str, ...],
                      kind: str) -> dict[str, str]:
    known = set(domain)
    out = {x: x for x in domain}
    if mapping:
        for k in sorted(mapping):
            v = mapping[k]
            if k not in known:
                raise DanglingIncidence(f"sigma_{kind} key {k!r} is not a known {kind} id")
            if v not in known:
                raise DanglingIncidence(f"sigma_{kind}[{k!r}] = {v!r} is not a known {kind} id")
            out[k] = v
    for x in domain:
        if out[out[x]] != x:
            raise NotInvolutive(
                f"sigma_{kind} is not an involution: {x!r} -> {out[x]!r} -> {out[out[x]]!r}")
    return out


class RealGraph:
    """A connected multigraph with a compatible involution.

    ``ends`` stores each edge's end pair in the order given at construction;
    the pair is unordered for all graph-theoretic purposes, but the stored
    order is preserved through serialization (metric graphs read it as an
    orientation).
    """

    __slots__ = (
        "_vertices", "_edges", "_ends", "_sv", "_se",
        "_vindex", "_adj", "_loops", "_real_vertices",
    )

    def __init__(self, vertices: Iterable[str],
                 ends: Mapping[str, tuple[str, str]],
                 sigma_v: Mapping[str, str] | None = None,
                 sigma_e: Mapping[str, str] | None = None):
        vs = [str(v) for v in vertices]
        if len(vs) != len(set(vs)):
            raise GraphValidationError("duplicate vertex id")
        if not vs:
            raise Disconnected("a graph must have at least one vertex")
        self._vertices = tuple(sorted(vs))
        eids = [str(e) for e in ends]
        if len(eids) != len(set(eids)):
            raise GraphValidationError("duplicate edge id")
        self._edges = tuple(sorted(eids))
        vset = set(self._vertices)
        stored: dict[str, tuple[str, str]] = {}
        for e in self._edges:
            pair = tuple(ends[e])
            if len(pair) != 2:
                raise DanglingIncidence(f"edge {e!r} must have exactly two ends")
            a, b = str(pair[0]), str(pair[1])
            if a not in vset:
                raise DanglingIncidence(f"edge {e!r} end {a!r} is not a vertex")
            if b not in vset:
                raise DanglingIncidence(f"edge {e!r} end {b!r} is not a vertex")
            stored[e] = (a, b)
        self._ends = stored
        self._sv = _total_involution(sigma_v, self._vertices, "v")
        self._se = _total_involution(sigma_e, self._edges, "e")
        for e in self._edges:
            image = self._se[e]
            want = frozenset(self._sv[x] for x in stored[e])
            have = frozenset(stored[image])
            if want != have:
                raise IncompatibleInvolution(
                    f"ends of sigma_e({e!r}) = {image!r} are {sorted(have)}, "
                    f"expected {sorted(want)}")
        self._vindex = {v: i for i, v in enumerate(self._vertices)}
        adj: list[dict[int, int]] = [dict() for _ in self._vertices]
        loops = [0] * len(self._vertices)
        for e in self._edges:
            a, b = stored[e]
            ia, ib = self._vindex[a], self._vindex[b]
            if ia == ib:
                loops[ia] += 1
            else:
                adj[ia][ib] = adj[ia].get(ib, 0) + 1
                adj[ib][ia] = adj[ib].get(ia, 0) + 1
        self._adj = [sorted(d.items()) for d in adj]
        self._loops = loops
        self._real_vertices = tuple(v for v in self._vertices if self._sv[v] == v)
        # connectivity (loops are irrelevant to it)
        seen = [False] * len(self._vertices)
        seen[0] = True
        stack = [0]
        count = 1
        while stack:
            i = stack.pop()
            for j, _ in self._adj[i]:
                if not seen[j]:
                    seen[j] = True
                    count += 1
                    stack.append(j)
        if count != len(self._vertices):
            missing = next(self._vertices[i] for i in range(len(seen)) if not seen[i])
            raise Disconnected(f"vertex {missing!r} is not reachable from {self._vertices[0]!r}")

    @property
    def vertices(self) -> tuple[str, ...]:
        return self._vertices

    @property
    def edges(self) -> tuple[str, ...]:
        return self._edges

    def ends(self, e: str) -> tuple[str, str]:
        return self._ends[e]

    def sigma_v(self, v: str) -> str:
        return self._sv[v]

    def sigma_e(self, e: str) -> str:
        return self._se[e]

    def is_real_vertex(self, v: str) -> bool:
        return self._sv[v] == v

    def is_real_edge(self, e: str) -> bool:
        return self._se[e] == e

    def is_isolated_real_edge(self, e: str) -> bool:
        """Fixed edge whose ends are not both fixed (they form a conjugate pair)."""
        if self._se[e] != e:
            return False
        a, b = self._ends[e]
        return not (self._sv[a] == a and self._sv[b] == b)

    @property
    def real_vertices(self) -> tuple[str, ...]:
        return self._real_vertices

    def nonreal_pairs(self) -> tuple[tuple[str, str], ...]:
        """Conjugate vertex pairs (v, sigma(v)) with v < sigma(v)."""
        out = []
        for v in self._vertices:
            w = self._sv[v]
            if v < w:
                out.append((v, w))
        return tuple(out)

    def valence(self, v: str) -> int:
        """Edge ends at v; a loop counts twice."""
        i = self._vindex[v]
        return sum(m for _, m in self._adj[i]) + 2 * self._loops[i]

    def genus(self) -> int:
        return 1 + len(self._edges) - len(self._vertices)

    def relabel(self, vertex_map: Mapping[str, str],
                edge_map: Mapping[str, str] | None = None) -> "RealGraph":
        emap = dict(edge_map) if edge_map else {e: e for e in self._edges}
        vmap = dict(vertex_map)
        ends = {emap[e]: (vmap[a], vmap[b]) for e, (a, b) in self._ends.items()}
        sv = {vmap[v]: vmap[self._sv[v]] for v in self._vertices}
        se = {emap[e]: emap[self._se[e]] for e in self._edges}
        return RealGraph([vmap[v] for v in self._vertices], ends, sv, se)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RealGraph):
            return NotImplemented
        return (self._vertices == other._vertices and self._edges == other._edges
                and self._ends == other._ends and self._sv == other._sv
                and self._se == other._se)

    def __hash__(self) -> int:
        return hash((self._vertices, self._edges, tuple(sorted(self._ends.items()))))

    def __repr__(self) -> str:
        return (f"RealGraph({len(self._vertices)} vertices, {len(self._edges)} edges, "
                f"genus {self.genus()})")


def validate(vertices: Iterable[str], ends: Mapping[str, tuple[str, str]],
             sigma_v: Mapping[str, str] | None = None,
             sigma_e: Mapping[str, str] | None = None) -> RealGraph:
    """Check all structural axioms and return the graph.

    Raises NotInvolutive, IncompatibleInvolution, Disconnected or
    DanglingIncidence, naming the violated axiom and a witness element.
    """
    return RealGraph(vertices, ends, sigma_v, sigma_e)


def genus(g: RealGraph) -> int:
    return g.genus()


@dataclass(frozen=True)
class PlainGraph:
    """A bare multigraph, possibly disconnected; used by the subgraph calculus."""

    vertices: tuple[str, ...]
    edges: tuple[str, ...]
    ends: Mapping[str, tuple[str, str]]

    def components(self) -> list[frozenset[str]]:
        uf = _UnionFind(self.vertices)
        for e in self.edges:
            a, b = self.ends[e]
            uf.union(a, b)
        return uf.groups()

    def component_count(self) -> int:
        return len(self.components())

    def genus(self) -> int:
        """First Betti number: components + edges - vertices."""
        return self.component_count() + len(self.edges) - len(self.vertices)


@dataclass(frozen=True)
class SubgraphRef:
    """A vertex/edge subset of a parent graph (every edge end stays inside)."""

    parent: RealGraph
    vertex_subset: frozenset[str]
    edge_subset: frozenset[str]

    def __post_init__(self):
        for e in self.edge_subset:
            a, b = self.parent.ends(e)
            if a not in self.vertex_subset or b not in self.vertex_subset:
                raise GraphValidationError(
                    f"edge {e!r} of a subgraph has an end outside its vertex set")

    def as_plain(self) -> PlainGraph:
        return PlainGraph(tuple(sorted(self.vertex_subset)),
                          tuple(sorted(self.edge_subset)),
                          {e: self.parent.ends(e) for e in self.edge_subset})

    def genus(self) -> int:
        return self.as_plain().genus()


def real_locus(g: RealGraph) -> SubgraphRef:
    """Fixed vertices together with the fixed edges whose ends are both fixed.

    Isolated real edges (fixed edges across a conjugate vertex pair) are
    excluded; they are counted separately by :func:`invariants`.
    """
    vs = frozenset(g.real_vertices)
    es = frozenset(e for e in g.edges
                   if g.is_real_edge(e) and not g.is_isolated_real_edge(e))
    return SubgraphRef(g, vs, es)


def _subgraph_components(g: RealGraph, vs: frozenset[str],
                         es: frozenset[str]) -> list[SubgraphRef]:
    if not vs:
        return []
    uf = _UnionFind(vs)
    for e in es:
        a, b = g.ends(e)
        uf.union(a, b)
    comps = []
    for group in uf.groups():
        ce = frozenset(e for e in es if g.ends(e)[0] in group)
        comps.append(SubgraphRef(g, group, ce))
    return comps


@dataclass(frozen=True)
class InvariantReport:
    """The real invariants of a graph.

    ``s`` equals the isolated-real-edge count plus the sum of (genus + 1)
    over real-locus components; ``a`` is 1 exactly when some non-fixed
    vertex reaches its conjugate through non-fixed vertices and edges only.
    """

    genus: int
    s_prime: int
    isolated_real_edge_count: int
    s: int
    a: int
    components_of_real_locus: tuple[SubgraphRef, ...]

    def as_dict(self) -> dict:
        return {
            "genus": self.genus,
            "s_prime": self.s_prime,
            "isolated_real_edges": self.isolated_real_edge_count,
            "s": self.s,
            "a": self.a,
            "real_locus_components": [sorted(c.vertex_subset)
                                      for c in self.components_of_real_locus],
        }


def invariants(g: RealGraph) -> InvariantReport:
    locus = real_locus(g)
    comps = _subgraph_components(g, locus.vertex_subset, locus.edge_subset)
    ei = sum(1 for e in g.edges if g.is_isolated_real_edge(e))
    s = ei + sum(c.genus() + 1 for c in comps)
    # a = 1 iff v and sigma(v) meet in the subgraph of non-fixed vertices and
    # non-fixed edges with both ends non-fixed.
    nonreal = [v for v in g.vertices if not g.is_real_vertex(v)]
    a = 0
    if nonreal:
        uf = _UnionFind(nonreal)
        nonreal_set = set(nonreal)
        for e in g.edges:
            if g.is_real_edge(e):
                continue
            x, y = g.ends(e)
            if x in nonreal_set and y in nonreal_set:
                uf.union(x, y)
        for v in nonreal:
            if uf.find(v) == uf.find(g.sigma_v(v)):
                a = 1
                break
    return InvariantReport(g.genus(), len(comps), ei, s, a, tuple(comps))


def check_invariant_bounds(report: InvariantReport) -> dict[str, bool]:
    """The parity and range constraints tying g, s and a together."""
    g, s, a = report.genus, report.s, report.a
    out = {
        "parity": (s - (g + 1)) % 2 == 0,
        "range": 0 <= s <= g + 1,
        "separating_min": a == 1 or s >= 1,
        "nonseparating_max": a == 0 or s <= g - 1,
    }
    out["ok"] = all(out.values())
    return out


def induced_subgraph(g: RealGraph, vertex_subset: Iterable[str]) -> SubgraphRef:
    """All edges with both ends inside the vertex subset."""
    vs = frozenset(vertex_subset)
    unknown = vs - set(g.vertices)
    if unknown:
        raise DanglingIncidence(f"unknown vertex {sorted(unknown)[0]!r}")
    es = frozenset(e for e in g.edges
                   if g.ends(e)[0] in vs and g.ends(e)[1] in vs)
    return SubgraphRef(g, vs, es)


def edge_span(g: RealGraph, edge_subset: Iterable[str]) -> SubgraphRef:
    """The given edges together with every vertex they touch."""
    es = frozenset(edge_subset)
    unknown = es - set(g.edges)
    if unknown:
        raise DanglingIncidence(f"unknown edge {sorted(unknown)[0]!r}")
    vs = frozenset(v for e in es for v in g.ends(e))
    return SubgraphRef(g, vs, es)


def delete_edges(g: RealGraph, edge_subset: Iterable[str]) -> PlainGraph:
    """Remove the given edges, keeping all vertices; may disconnect."""
    es = frozenset(edge_subset)
    unknown = es - set(g.edges)
    if unknown:
        raise DanglingIncidence(f"unknown edge {sorted(unknown)[0]!r}")
    kept = tuple(e for e in g.edges if e not in es)
    return PlainGraph(g.vertices, kept, {e: g.ends(e) for e in kept})


def contract_complement(g: RealGraph, edge_subset: Iterable[str]) -> PlainGraph:
    """Contract every edge outside the subset.

    Vertices become the components of the deletion graph, named by their
    least member; the kept edges keep their ids with remapped ends.
    """
    es = frozenset(edge_subset)
    unknown = es - set(g.edges)
    if unknown:
        raise DanglingIncidence(f"unknown edge {sorted(unknown)[0]!r}")
    uf = _UnionFind(g.vertices)
    for e in g.edges:
        if e not in es:
            a, b = g.ends(e)
            uf.union(a, b)
    name = {}
    for group in uf.groups():
        rep = min(group)
        for v in group:
            name[v] = rep
    kept = tuple(sorted(es))
    ends = {e: (name[g.ends(e)[0]], name[g.ends(e)[1]]) for e in kept}
    return PlainGraph(tuple(sorted(set(name.values()))), kept, ends)


def genus_decomposition_check(g: RealGraph, edge_subset: Iterable[str]) -> bool:
    """g(G) should split as the genus of the contraction plus the deletion's."""
    es = frozenset(edge_subset)
    return (contract_complement(g, es).genus() + delete_edges(g, es).genus()
            == g.genus())


def relabel(g: RealGraph, vertex_map: Mapping[str, str],
            edge_map: Mapping[str, str] | None = None) -> RealGraph:
    return g.relabel(vertex_map, edge_map)


# ---------------------------------------------------------------------------
# JSON interchange

def graph_to_doc(g: RealGraph) -> dict:
    doc: dict = {
        "vertices": list(g.vertices),
        "edges": [{"id": e, "ends": list(g.ends(e))} for e in g.edges],
    }
    sv = {v: g.sigma_v(v) for v in g.vertices if g.sigma_v(v) != v}
    se = {e: g.sigma_e(e) for e in g.edges if g.sigma_e(e) != e}
    if sv:
        doc["sigma_v"] = dict(sorted(sv.items()))
    if se:
        doc["sigma_e"] = dict(sorted(se.items()))
    return doc


def graph_from_doc(doc: Mapping) -> RealGraph:
    try:
        vertices = doc["vertices"]
        edge_entries = doc["edges"]
    except (KeyError, TypeError) as exc:
        raise DanglingIncidence(f"graph document is missing {exc}") from None
    ends = {}
    for entry in edge_entries:
        ends[str(entry["id"])] = (str(entry["ends"][0]), str(entry["ends"][1]))
    return validate(vertices, ends, doc.get("sigma_v"), doc.get("sigma_e"))


def to_json(g: RealGraph) -> str:
    return json.dumps(graph_to_doc(g), sort_keys=True, indent=2)


def from_json(text: str) -> RealGraph:
    return graph_from_doc(json.loads(text))
