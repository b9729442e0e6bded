"""Deterministic constructors of graphs with real structure.

Three explicit families realize every admissible invariant triple
(g, s, a).  A doubling construction glues two copies of a base graph
through one real vertex, producing the standard example where real rank
exceeds ordinary rank.  Subdivision replaces each edge by a chain while
transporting the involution: conjugate edge pairs become conjugate chains,
fixed edges with fixed ends become all-real chains, and isolated fixed
edges become chains reflected about their middle.

A seeded generator builds valid real structures directly (fixed vertices,
conjugate vertex pairs, and orbit-complete edge sets), so it never has to
reject a sample; profiles bias the shapes toward M-graphs, strong
M-graphs, graphs with empty real locus, or plain graphs with the identity
involution.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping

from .divisor import Divisor
from .errors import (
    DanglingIncidence,
    GenusTooSmall,
    InadmissibleTriple,
    PreconditionViolated,
)
from .graph import RealGraph, invariants
from .realdivisor import is_M_graph, is_strong_M_graph

__all__ = [
    "example1",
    "example2",
    "subdivide",
    "edge_split",
    "random_real_graph",
    "plain_cycle",
    "plain_banana",
    "PROFILES",
]


def example1(g: int, s: int, a: int) -> RealGraph:
    """A graph with invariants exactly (g, s, a), for any admissible triple.

    Admissibility: 0 <= s <= g+1, s = g+1 (mod 2), a in {0, 1}, with s >= 1
    when a = 0 and s <= g-1 when a = 1.
    """
    if a not in (0, 1):
        raise InadmissibleTriple(f"a must be 0 or 1, got {a!r}")
    if g < 0 or s < 0:
        raise InadmissibleTriple(f"g and s must be nonnegative, got ({g}, {s})")
    if (s - (g + 1)) % 2 != 0:
        raise InadmissibleTriple(f"s = {s} must have the parity of g+1 = {g + 1}")
    if s > g + 1:
        raise InadmissibleTriple(f"s = {s} exceeds g+1 = {g + 1}")
    if a == 0 and s == 0:
        raise InadmissibleTriple("a graph with empty real locus is nonseparating "
                                 "(a = 0 forces s >= 1)")
    if a == 1 and s > g - 1:
        raise InadmissibleTriple(f"a = 1 forces s <= g-1, got s = {s}, g = {g}")

    vertices: list[str] = []
    ends: dict[str, tuple[str, str]] = {}
    sv: dict[str, str] = {}
    se: dict[str, str] = {}

    def pair_edges(name: str, e1: tuple[str, str], e2: tuple[str, str]) -> None:
        ends[name] = e1
        ends[name + "c"] = e2
        se[name] = name + "c"
        se[name + "c"] = name

    if a == 0:
        # fixed path with doubled conjugate edges, plus a conjugate pair of
        # doubled tails whose links raise the genus by 2 apiece
        x = (g + 1 - s) // 2
        vertices += [f"v{i}" for i in range(1, s + 1)]
        for i in range(1, s):
            pair_edges(f"e{i}", (f"v{i}", f"v{i + 1}"), (f"v{i}", f"v{i + 1}"))
        for i in range(1, x + 1):
            vertices += [f"w{i}", f"w{i}c"]
            sv[f"w{i}"] = f"w{i}c"
            sv[f"w{i}c"] = f"w{i}"
            prev, prevc = (("v1", "v1") if i == 1
                           else (f"w{i - 1}", f"w{i - 1}c"))
            pair_edges(f"f{i}", (prev, f"w{i}"), (prevc, f"w{i}c"))
            pair_edges(f"g{i}", (prev, f"w{i}"), (prevc, f"w{i}c"))
    elif s == 0:
        # one conjugate vertex pair joined by parallel conjugate edges
        x = (g + 1) // 2
        vertices += ["v", "vc"]
        sv["v"] = "vc"
        sv["vc"] = "v"
        for i in range(1, x + 1):
            pair_edges(f"e{i}", ("v", "vc"), ("vc", "v"))
    else:
        # fixed path as in the first family, with a conjugate vertex pair
        # hung off its far end and joined by parallel conjugate edges
        x = (g + 1 - s) // 2
        vertices += [f"v{i}" for i in range(1, s + 1)]
        for i in range(1, s):
            pair_edges(f"e{i}", (f"v{i}", f"v{i + 1}"), (f"v{i}", f"v{i + 1}"))
        vertices += ["v", "vc"]
        sv["v"] = "vc"
        sv["vc"] = "v"
        pair_edges("b", (f"v{s}", "v"), (f"v{s}", "vc"))
        for i in range(1, x + 1):
            pair_edges(f"f{i}", ("v", "vc"), ("vc", "v"))

    out = RealGraph(vertices, ends, sv, se)
    rep = invariants(out)
    assert (rep.genus, rep.s, rep.a) == (g, s, a)
    return out


def example2(base: RealGraph, v: str) -> tuple[RealGraph, Divisor]:
    """Two copies of a positive-genus base joined through one fixed vertex.

    The involution swaps the copies; the returned divisor is the joining
    vertex, which has ordinary rank 0 but real rank 1.
    """
    if base.genus() < 1:
        raise GenusTooSmall(f"the base graph must have genus >= 1, "
                            f"got {base.genus()}")
    if v not in base.vertices:
        raise DanglingIncidence(f"{v!r} is not a vertex of the base graph")
    vertices = ["v"]
    ends: dict[str, tuple[str, str]] = {}
    sv: dict[str, str] = {}
    se: dict[str, str] = {}
    for u in base.vertices:
        vertices += [f"c1_{u}", f"c2_{u}"]
        sv[f"c1_{u}"] = f"c2_{u}"
        sv[f"c2_{u}"] = f"c1_{u}"
    for e in base.edges:
        ea, eb = base.ends(e)
        ends[f"c1_{e}"] = (f"c1_{ea}", f"c1_{eb}")
        ends[f"c2_{e}"] = (f"c2_{ea}", f"c2_{eb}")
        se[f"c1_{e}"] = f"c2_{e}"
        se[f"c2_{e}"] = f"c1_{e}"
    ends["b1"] = ("v", f"c1_{v}")
    ends["b2"] = ("v", f"c2_{v}")
    se["b1"] = "b2"
    se["b2"] = "b1"
    out = RealGraph(vertices, ends, sv, se)
    return out, Divisor(out, {"v": 1})


# ---------------------------------------------------------------------------
# subdivision

@dataclass(frozen=True)
class SubdivisionResult:
    """A subdivided graph with maps back to the original edges.

    ``chains[e]`` lists the replacement edge ids in order along the chain;
    ``interiors[e]`` the interior vertex ids in the same order;
    ``orientation[e]`` the (start, end) vertex pair the chain runs along.
    """

    graph: RealGraph
    chains: Mapping[str, tuple[str, ...]]
    interiors: Mapping[str, tuple[str, ...]]
    orientation: Mapping[str, tuple[str, str]]


def _fresh(candidate: str, used: set[str]) -> str:
    while candidate in used:
        candidate += "_"
    used.add(candidate)
    return candidate


def _subdivide_engine(g: RealGraph, parts: Mapping[str, int]) -> SubdivisionResult:
    """Replace each edge e by a chain of parts[e] edges.

    parts must be constant on conjugation orbits and at least 1 everywhere.
    Conjugate pairs become index-matched conjugate chains; fixed edges with
    fixed ends become all-real chains; isolated fixed edges become chains
    reflected about their middle, indexed from the lexicographically
    smaller end.
    """
    for e in g.edges:
        if parts[e] < 1:
            raise PreconditionViolated(f"parts[{e!r}] = {parts[e]} must be >= 1")
        if parts[e] != parts[g.sigma_e(e)]:
            raise PreconditionViolated(f"parts must agree on the conjugate "
                                       f"pair {e!r}, {g.sigma_e(e)!r}")
    used_v = set(g.vertices)
    used_e = set(g.edges)
    vertices = list(g.vertices)
    ends: dict[str, tuple[str, str]] = {}
    sv = {v: g.sigma_v(v) for v in g.vertices if g.sigma_v(v) != v}
    se: dict[str, str] = {}
    chains: dict[str, tuple[str, ...]] = {}
    interiors: dict[str, tuple[str, ...]] = {}
    orientation: dict[str, tuple[str, str]] = {}

    def build_chain(e: str, start: str, stop: str, n: int
                    ) -> tuple[list[str], list[str]]:
        """Fresh chain ids for e running start -> stop; registers ends."""
        inner = [_fresh(f"{e}.v{i}", used_v) for i in range(1, n)]
        names = [_fresh(f"{e}.{i}", used_e) for i in range(1, n + 1)]
        nodes = [start] + inner + [stop]
        for i, name in enumerate(names):
            ends[name] = (nodes[i], nodes[i + 1])
        vertices.extend(inner)
        chains[e] = tuple(names)
        interiors[e] = tuple(inner)
        orientation[e] = (start, stop)
        return names, inner

    for e in g.edges:
        mate = g.sigma_e(e)
        n = parts[e]
        if n == 1:
            # untouched edge: keep its stored ends exactly
            ends[e] = g.ends(e)
            chains[e] = (e,)
            interiors[e] = ()
            orientation[e] = g.ends(e)
            if mate != e:
                se[e] = mate
            continue
        if mate == e and not g.is_isolated_real_edge(e):
            # both ends fixed: the whole chain is fixed
            build_chain(e, *g.ends(e), n)
        elif mate == e:
            # isolated fixed edge: reflect the chain about its middle
            a, b = g.ends(e)
            start, stop = (a, b) if a <= b else (b, a)
            names, inner = build_chain(e, start, stop, n)
            for i in range(1, n):
                sv[inner[i - 1]] = inner[n - i - 1]
            for i in range(1, n + 1):
                se[names[i - 1]] = names[n - i]
        elif e < mate:
            # conjugate pair: the partner chain is the sigma image
            a, b = g.ends(e)
            names, inner = build_chain(e, a, b, n)
            mnames, minner = build_chain(mate, g.sigma_v(a), g.sigma_v(b), n)
            for u, mu in zip(inner, minner):
                sv[u] = mu
                sv[mu] = u
            for x, mx in zip(names, mnames):
                se[x] = mx
                se[mx] = x
    return SubdivisionResult(RealGraph(vertices, ends, sv, se),
                             chains, interiors, orientation)


def subdivide(g: RealGraph, d: int) -> RealGraph:
    """Each edge replaced by a chain of d edges, involution transported."""
    if d < 1:
        raise PreconditionViolated(f"subdivision arity must be >= 1, got {d}")
    if d == 1:
        return g
    return _subdivide_engine(g, {e: d for e in g.edges}).graph


def edge_split(g: RealGraph) -> RealGraph:
    """Replace each isolated fixed edge by a fixed midpoint vertex and a
    conjugate edge pair; all other edges are untouched.

    Preserves g, s and a; the result has no isolated fixed edges.
    """
    parts = {e: 2 if g.is_isolated_real_edge(e) else 1 for e in g.edges}
    if all(n == 1 for n in parts.values()):
        return g
    return _subdivide_engine(g, parts).graph


# ---------------------------------------------------------------------------
# seeded generator

PROFILES = ("default", "real_locus_empty", "m_graph", "strong_m", "identity")


class _Builder:
    """Accumulates an orbit-complete edge set over typed vertices."""

    def __init__(self, rng: random.Random, max_vertices: int, max_edges: int):
        self.rng = rng
        self.vleft = max_vertices
        self.eleft = max_edges
        self.reals: list[str] = []
        self.pairs: list[tuple[str, str]] = []
        self.ends: dict[str, tuple[str, str]] = {}
        self.sv: dict[str, str] = {}
        self.se: dict[str, str] = {}
        self._v = 0
        self._e = 0

    def add_real(self) -> str:
        name = f"r{self._v}"
        self._v += 1
        self.vleft -= 1
        self.reals.append(name)
        return name

    def add_pair(self) -> tuple[str, str]:
        p, q = f"p{self._v}", f"q{self._v}"
        self._v += 1
        self.vleft -= 2
        self.sv[p] = q
        self.sv[q] = p
        self.pairs.append((p, q))
        return p, q

    def sigma(self, v: str) -> str:
        return self.sv.get(v, v)

    def add_fixed_edge(self, a: str, b: str) -> None:
        name = f"e{self._e}"
        self._e += 1
        self.eleft -= 1
        self.ends[name] = (a, b)

    def add_conjugate_edges(self, a: str, b: str) -> None:
        """The edge (a, b) together with its conjugate (sigma a, sigma b)."""
        e1, e2 = f"e{self._e}", f"e{self._e + 1}"
        self._e += 2
        self.eleft -= 2
        self.ends[e1] = (a, b)
        self.ends[e2] = (self.sigma(a), self.sigma(b))
        self.se[e1] = e2
        self.se[e2] = e1

    def vertices(self) -> list[str]:
        return self.reals + [v for p in self.pairs for v in p]

    def finish(self) -> RealGraph:
        return RealGraph(self.vertices(), self.ends, self.sv, self.se)


def _generate_default(b: _Builder, allow_loops: bool, empty_locus: bool) -> None:
    rng = b.rng
    # first unit
    if empty_locus and b.vleft >= 2 and b.eleft >= 2:
        p, q = b.add_pair()
        b.add_conjugate_edges(p, q)
    elif not empty_locus and b.vleft >= 2 and b.eleft >= 1 and rng.random() < 0.4:
        p, q = b.add_pair()
        if b.eleft >= 2 and rng.random() < 0.5:
            b.add_conjugate_edges(p, q)
        else:
            b.add_fixed_edge(p, q)
    else:
        b.add_real()
    # attach further units, each immediately connected
    while rng.random() < 0.8:
        want_pair = b.vleft >= 2 and b.eleft >= 2 and (
            empty_locus or rng.random() < 0.5)
        if want_pair:
            p, q = b.add_pair()
            if b.pairs[:-1] and (empty_locus or not b.reals or rng.random() < 0.5):
                x, y = rng.choice(b.pairs[:-1])
                if rng.random() < 0.5:
                    x, y = y, x
                b.add_conjugate_edges(p, x)
            elif b.reals:
                u = rng.choice(b.reals)
                b.add_conjugate_edges(u, p)
            else:
                b.add_conjugate_edges(p, q)
        elif not empty_locus and b.vleft >= 1 and b.eleft >= 1:
            others_real = list(b.reals)
            u = b.add_real()
            if others_real and (not b.pairs or b.eleft < 2 or rng.random() < 0.5):
                b.add_fixed_edge(u, rng.choice(others_real))
            elif b.pairs and b.eleft >= 2:
                x, _ = rng.choice(b.pairs)
                b.add_conjugate_edges(u, x)
            elif others_real:
                b.add_fixed_edge(u, rng.choice(others_real))
            else:
                break
        else:
            break
    # decorate with extra edge orbits
    while b.eleft >= 1 and rng.random() < 0.6:
        verts = sorted(b.vertices())
        a = rng.choice(verts)
        z = rng.choice(verts)
        if empty_locus or b.sigma(a) != a or b.sigma(z) != z:
            # any non-fixed endpoint forces a conjugate orbit
            if b.eleft < 2:
                break
            if a == z and not allow_loops:
                continue
            if empty_locus and a == b.sigma(z):
                b.add_conjugate_edges(a, z)
            elif a == z:
                b.add_conjugate_edges(a, a)
            else:
                b.add_conjugate_edges(a, z)
        else:
            if a == z:
                if not allow_loops:
                    continue
                if rng.random() < 0.5 and b.eleft >= 2:
                    b.add_conjugate_edges(a, a)
                else:
                    b.add_fixed_edge(a, a)
            elif rng.random() < 0.5 and b.eleft >= 2:
                b.add_conjugate_edges(a, z)
            else:
                b.add_fixed_edge(a, z)
    # isolated fixed edges across conjugate pairs
    if not empty_locus:
        for p, q in b.pairs:
            if b.eleft >= 1 and rng.random() < 0.25:
                b.add_fixed_edge(p, q)


def _generate_m(b: _Builder, allow_loops: bool, strong: bool) -> None:
    """Locus components stay trees unless bumped; bridges come doubled or
    pass through a conjugate pair, so s = g + 1 by construction."""
    rng = b.rng
    comps: list[list[str]] = [[b.add_real()]]
    while rng.random() < 0.8:
        choices = []
        if b.vleft >= 1 and b.eleft >= 1:
            choices.append("grow")
        if b.vleft >= 1 and b.eleft >= 2:
            choices.append("bridge")
        if b.vleft >= 3 and b.eleft >= 4:
            choices.append("through")
        if b.vleft >= 2 and b.eleft >= 2:
            choices.append("pendant")
        if not strong and b.eleft >= 1:
            if any(len(c) >= 2 for c in comps) or allow_loops:
                choices.append("bump")
        if not choices:
            break
        action = rng.choice(choices)
        if action == "grow":
            comp = rng.choice(comps)
            u = b.add_real()
            b.add_fixed_edge(rng.choice(comp), u)
            comp.append(u)
        elif action == "bridge":
            u = rng.choice(rng.choice(comps))
            w = b.add_real()
            comps.append([w])
            b.add_conjugate_edges(u, w)
        elif action == "through":
            u = rng.choice(rng.choice(comps))
            p, q = b.add_pair()
            w = b.add_real()
            comps.append([w])
            b.add_conjugate_edges(u, p)
            b.add_conjugate_edges(p, w)
        elif action == "pendant":
            verts = sorted(b.vertices())
            u = rng.choice(verts)
            p, q = b.add_pair()
            b.add_conjugate_edges(u, p)
        else:
            big = [c for c in comps if len(c) >= 2]
            if big and (not allow_loops or rng.random() < 0.7):
                comp = rng.choice(big)
                a, z = rng.sample(comp, 2)
                b.add_fixed_edge(a, z)
            else:
                comp = rng.choice(comps)
                b.add_fixed_edge(comp[0], comp[0])


def _generate_identity(b: _Builder, allow_loops: bool) -> None:
    rng = b.rng
    n = rng.randint(1, b.vleft)
    first = b.add_real()
    for _ in range(n - 1):
        if b.eleft < 1:
            break
        others = list(b.reals)
        u = b.add_real()
        b.add_fixed_edge(rng.choice(others), u)
    extra = rng.randint(0, b.eleft)
    for _ in range(extra):
        a = rng.choice(b.reals)
        z = rng.choice(b.reals)
        if a == z and not allow_loops:
            continue
        b.add_fixed_edge(a, z)


def random_real_graph(seed: int, max_vertices: int = 10, max_edges: int = 16,
                      profile: str = "default", *,
                      allow_loops: bool = True) -> RealGraph:
    """A valid connected graph with real structure, deterministic in seed.

    Vertices and edges are created directly in conjugation orbits, so the
    involution axioms hold by construction.  Profiles: "default" mixes all
    orbit shapes, "real_locus_empty" avoids fixed vertices and fixed edges,
    "m_graph" and "strong_m" build (strong) M-graphs, "identity" uses the
    trivial involution.  Bounds are upper limits, not targets.
    """
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}; choose from {PROFILES}")
    if max_vertices < 1 or max_edges < 0:
        raise PreconditionViolated("need max_vertices >= 1 and max_edges >= 0")
    rng = random.Random(1_000_003 * int(seed) + PROFILES.index(profile))
    b = _Builder(rng, max_vertices, max_edges)
    if profile == "identity":
        _generate_identity(b, allow_loops)
    elif profile in ("m_graph", "strong_m"):
        _generate_m(b, allow_loops, strong=profile == "strong_m")
    else:
        empty = profile == "real_locus_empty"
        if empty and (max_vertices < 2 or max_edges < 2):
            b.add_real()
        else:
            _generate_default(b, allow_loops, empty)
    out = b.finish()
    if profile == "m_graph":
        assert is_M_graph(out)
    if profile == "strong_m":
        assert is_strong_M_graph(out)
    return out


# ---------------------------------------------------------------------------
# small plain bases for the doubling construction

def plain_cycle(n: int) -> RealGraph:
    """A cycle on n >= 1 vertices with the identity involution."""
    if n < 1:
        raise PreconditionViolated(f"cycle length must be >= 1, got {n}")
    vertices = [f"v{i}" for i in range(n)]
    ends = {f"e{i}": (f"v{i}", f"v{(i + 1) % n}") for i in range(n)}
    return RealGraph(vertices, ends)


def plain_banana(n: int) -> RealGraph:
    """Two vertices joined by n >= 1 parallel edges, identity involution."""
    if n < 1:
        raise PreconditionViolated(f"banana needs >= 1 edges, got {n}")
    ends = {f"e{i}": ("u", "w") for i in range(n)}
    return RealGraph(["u", "w"], ends)
