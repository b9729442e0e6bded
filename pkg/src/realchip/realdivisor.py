"""Divisor theory interacting with the involution.

A divisor is real when it equals its conjugate (coefficients constant on
vertex orbits); it is totally real when it is also supported on fixed
vertices.  On a connected graph any equivalence between two real divisors
is witnessed by a real potential: the difference f - f(sigma .) is a
constant equal to its own negative, hence zero.

The M-graph condition (no isolated fixed edges and s = g + 1) makes every
real effective divisor class reach a totally real representative, pair by
pair: each conjugate pair v + sigma(v) is equivalent to 2w for some fixed
vertex w, and firing the witness moves the chips without ever leaving the
effective cone.  Strong M-graphs (additionally s' = g + 1, so every locus
component is a tree) carry a real divisor of degree 2 and rank at least 1,
found here by direct sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .divisor import (
    Divisor,
    PotentialFunction,
    laplacian,
    linearly_equivalent,
    q_reduce,
    rank,
    resolve_budget,
)
from .errors import (
    EnumerationBudgetExceeded,
    NotEquivalent,
    NotMGraph,
    NotRealEffective,
    NotReal,
    NotStrongMGraph,
    PreconditionViolated,
    SearchExhausted,
)
from .graph import RealGraph, invariants

__all__ = [
    "conjugate",
    "conjugate_potential",
    "is_real",
    "is_real_potential",
    "is_totally_real",
    "real_effective_divisors",
    "real_rank",
    "symmetrize",
    "real_witness",
    "ParitySignature",
    "parity_signature",
    "is_M_graph",
    "is_strong_M_graph",
    "vertex_pair_reduce",
    "totally_real_reduction",
    "find_real_g12",
]


def conjugate(d: Divisor) -> Divisor:
    """The divisor v -> d(sigma(v))."""
    g = d.graph
    return Divisor(g, {g.sigma_v(v): c for v, c in d.coeffs().items()})


def conjugate_potential(f: PotentialFunction) -> PotentialFunction:
    """The potential v -> f(sigma(v))."""
    g = f.graph
    return PotentialFunction(g, {g.sigma_v(v): c for v, c in f.values().items()})


def is_real(d: Divisor) -> bool:
    return conjugate(d) == d


def is_real_potential(f: PotentialFunction) -> bool:
    return conjugate_potential(f) == f


def is_totally_real(d: Divisor) -> bool:
    """Real and supported on fixed vertices only."""
    g = d.graph
    return is_real(d) and all(g.is_real_vertex(v) for v in d.support())


def real_effective_divisors(graph: RealGraph, degree: int,
                            budget: int | None = None) -> Iterator[Divisor]:
    """All effective divisors of the given degree fixed by the involution.

    Enumerated over vertex orbits: each fixed vertex carries any
    nonnegative count, each conjugate pair an even split.
    """
    if degree < 0:
        return
    fixed = list(graph.real_vertices)
    pairs = graph.nonreal_pairs()
    norbits = len(fixed) + len(pairs)
    if norbits == 0:
        return
    bound = math.comb(degree + norbits - 1, norbits - 1)
    if bound > resolve_budget(budget):
        raise EnumerationBudgetExceeded(
            f"real effective divisors of degree {degree} exceed the budget")

    def rec(i: int, remaining: int, acc: dict[str, int]) -> Iterator[Divisor]:
        if i == norbits:
            if remaining == 0:
                yield Divisor(graph, acc)
            return
        if i < len(fixed):
            v = fixed[i]
            for c in range(remaining + 1):
                if c:
                    acc[v] = c
                yield from rec(i + 1, remaining - c, acc)
                acc.pop(v, None)
        else:
            v, w = pairs[i - len(fixed)]
            for c in range(remaining // 2 + 1):
                if c:
                    acc[v] = c
                    acc[w] = c
                yield from rec(i + 1, remaining - 2 * c, acc)
                acc.pop(v, None)
                acc.pop(w, None)

    yield from rec(0, degree, {})


def _class_contains_real_effective(d: Divisor, budget: int | None = None) -> bool:
    if d.degree() < 0:
        return False
    target = q_reduce(d)[0].divisor
    for e in real_effective_divisors(d.graph, d.degree(), budget):
        if q_reduce(e)[0].divisor == target:
            return True
    return False


def real_rank(d: Divisor, budget: int | None = None) -> int:
    """Largest r such that after removing any real effective divisor of
    degree at most r, the class still contains a real effective divisor.

    -1 when the class of d has no real effective member (the degree-0 case
    quantifies over E = 0 alone).  The value is capped by the degree of d
    and is never below the ordinary rank.
    """
    if not is_real(d):
        raise NotReal(f"real_rank needs a real divisor, got {d!r}")
    deg = d.degree()
    if deg < 0:
        return -1
    r = 0
    while r <= deg:
        ok = all(_class_contains_real_effective(d - e, budget)
                 for e in real_effective_divisors(d.graph, r, budget))
        if not ok:
            return r - 1
        r += 1
    return deg


def symmetrize(d: Divisor, f: PotentialFunction,
               target: Divisor) -> tuple[PotentialFunction, Divisor]:
    """Replace a witness of domination by a real one.

    Given real d, real effective target E and any f with d + Delta(f)
    effective and >= E, the pointwise maximum g of f and its conjugate
    satisfies the same bounds while d + Delta(g) is also real.  Returns
    (g, d + Delta(g)); the postconditions are checked at runtime.
    """
    if not is_real(d):
        raise NotReal(f"symmetrize needs a real divisor, got {d!r}")
    if f.graph != d.graph or target.graph != d.graph:
        raise PreconditionViolated("divisor, potential and target must share a graph")
    if not (is_real(target) and target.is_effective()):
        raise PreconditionViolated("target must be a real effective divisor")
    moved = d + laplacian(d.graph, f)
    if not moved.is_effective():
        raise PreconditionViolated("d + Delta(f) must be effective")
    if not (moved - target).is_effective():
        raise PreconditionViolated("d + Delta(f) must dominate the target")
    g = f.pointwise_max(conjugate_potential(f))
    out = d + laplacian(d.graph, g)
    assert is_real(out), "symmetrized divisor is not real"
    assert out.is_effective(), "symmetrized potential lost effectivity"
    assert (out - target).is_effective(), "symmetrized divisor lost domination"
    return g, out


def real_witness(d1: Divisor, d2: Divisor) -> PotentialFunction:
    """A real potential f with d1 + Delta(f) = d2.

    Both divisors must be real; on a connected graph every witness between
    real divisors is automatically real, and that is asserted.  Raises
    NotEquivalent when the divisors are not linearly equivalent.
    """
    if not is_real(d1):
        raise NotReal(f"{d1!r} is not real")
    if not is_real(d2):
        raise NotReal(f"{d2!r} is not real")
    f = linearly_equivalent(d1, d2)
    if f is None:
        raise NotEquivalent(f"{d1!r} and {d2!r} are not linearly equivalent")
    assert is_real_potential(f), "witness between real divisors must be real"
    return f


@dataclass(frozen=True)
class ParitySignature:
    """Degree parities of a real divisor over the real-locus components.

    Components are listed by their least vertex; each entry of ``parities``
    is the mod-2 degree of the divisor restricted to that component's
    vertices.  The signature is constant on real equivalence classes.
    """

    components: tuple[tuple[str, ...], ...]
    parities: tuple[int, ...]

    def as_dict(self) -> dict:
        return {"components": [list(c) for c in self.components],
                "parities": list(self.parities)}


def parity_signature(d: Divisor) -> ParitySignature:
    if not is_real(d):
        raise NotReal(f"parity signature needs a real divisor, got {d!r}")
    comps = invariants(d.graph).components_of_real_locus
    names = tuple(tuple(sorted(c.vertex_subset)) for c in comps)
    pars = tuple(sum(d[v] for v in c.vertex_subset) % 2 for c in comps)
    return ParitySignature(names, pars)


def is_M_graph(graph: RealGraph) -> bool:
    """No isolated fixed edges and s = g + 1 (the maximal value)."""
    rep = invariants(graph)
    return rep.isolated_real_edge_count == 0 and rep.s == rep.genus + 1


def is_strong_M_graph(graph: RealGraph) -> bool:
    """An M-graph whose real locus has g + 1 components (all of them trees)."""
    rep = invariants(graph)
    return (rep.isolated_real_edge_count == 0 and rep.s == rep.genus + 1
            and rep.s_prime == rep.genus + 1)


def vertex_pair_reduce(graph: RealGraph, v: str) -> tuple[str, PotentialFunction]:
    """A fixed vertex w with v + sigma(v) ~ 2w, plus the real witness.

    Scans fixed vertices in sorted order and compares reduced forms.  On an
    M-graph some w always works; SearchExhausted otherwise certifies the
    defect.
    """
    if not is_M_graph(graph):
        raise NotMGraph("vertex_pair_reduce needs an M-graph")
    vbar = graph.sigma_v(v)
    if vbar == v:
        raise PreconditionViolated(f"{v!r} is a fixed vertex, nothing to reduce")
    pair = Divisor(graph, {v: 1, vbar: 1})
    form, f_pair = q_reduce(pair)
    for w in graph.real_vertices:
        target, f_w = q_reduce(Divisor(graph, {w: 2}))
        if target.divisor == form.divisor:
            witness = f_pair - f_w
            assert is_real_potential(witness)
            return w, witness
    raise SearchExhausted(
        f"no fixed vertex w with {v!r} + {vbar!r} ~ 2w; "
        f"reduced form of the pair is {form.divisor!r}")


def totally_real_reduction(d: Divisor) -> tuple[Divisor, PotentialFunction]:
    """An equivalent totally real effective divisor, plus the real witness.

    Needs an M-graph and a real effective divisor.  Conjugate pairs in the
    support are cleared one at a time: the full coefficient c at the least
    remaining pair moves to a fixed vertex through c times the pair witness,
    which keeps the divisor effective throughout.
    """
    graph = d.graph
    if not (is_real(d) and d.is_effective()):
        raise NotRealEffective(f"totally_real_reduction needs a real effective "
                               f"divisor, got {d!r}")
    if not is_M_graph(graph):
        raise NotMGraph("totally_real_reduction needs an M-graph")
    # reduced form of 2w for each fixed w, computed once
    targets: dict[Divisor, tuple[str, PotentialFunction]] = {}
    for w in graph.real_vertices:
        form, f_w = q_reduce(Divisor(graph, {w: 2}))
        targets.setdefault(form.divisor, (w, f_w))
    current = d
    total = PotentialFunction(graph)
    while True:
        nonfixed = [v for v in current.support() if not graph.is_real_vertex(v)]
        if not nonfixed:
            break
        v = nonfixed[0]
        vbar = graph.sigma_v(v)
        c = current[v]
        assert current[vbar] == c, "real divisor has unequal pair coefficients"
        form, f_pair = q_reduce(Divisor(graph, {v: 1, vbar: 1}))
        hit = targets.get(form.divisor)
        if hit is None:
            raise SearchExhausted(
                f"no fixed vertex w with {v!r} + {vbar!r} ~ 2w")
        w, f_w = hit
        witness = f_pair - f_w
        current = current + laplacian(graph, c * witness)
        total = total + c * witness
        assert current.is_effective(), "pair reduction left the effective cone"
    assert is_totally_real(current)
    assert is_real_potential(total)
    return current, total


def find_real_g12(graph: RealGraph, budget: int | None = None) -> Divisor:
    """A real divisor of degree 2 and rank at least 1 on a strong M-graph.

    Sweeps 2w over fixed vertices, then sums of two distinct fixed
    vertices, then conjugate pairs, returning the first hit.  On a graph of
    positive genus the rank of the result is checked to be exactly 1.
    """
    if not is_strong_M_graph(graph):
        raise NotStrongMGraph("find_real_g12 needs a strong M-graph")
    candidates: list[Divisor] = []
    fixed = graph.real_vertices
    for w in fixed:
        candidates.append(Divisor(graph, {w: 2}))
    for i, w1 in enumerate(fixed):
        for w2 in fixed[i + 1:]:
            candidates.append(Divisor(graph, {w1: 1, w2: 1}))
    for v, vbar in graph.nonreal_pairs():
        candidates.append(Divisor(graph, {v: 1, vbar: 1}))
    for d in candidates:
        r = rank(d, budget)
        if r >= 1:
            if graph.genus() >= 1:
                assert r == 1, "degree-2 divisor of rank 2 forces genus 0"
            return d
    raise SearchExhausted(
        f"no real divisor of degree 2 with rank >= 1 on {graph!r}")
