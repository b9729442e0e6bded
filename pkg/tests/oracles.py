"""Brute-force reference implementations the tests compare against.

Nothing here is used by the library itself.  The implementations favor
obviousness over speed: linear equivalence is decided by integer-lattice
membership in the Laplacian image (via diagonalization over the integers),
q-reducedness by checking every firing set, and graph isomorphism by
handing a colored incidence encoding to networkx.
"""

from __future__ import annotations

import itertools

import networkx as nx
from networkx.algorithms import isomorphism

from realchip import Divisor, RealGraph, validate


# ---------------------------------------------------------------------------
# integer lattice membership

def laplacian_image_matrix(g: RealGraph) -> list[list[int]]:
    """Column j is the principal divisor of the indicator of vertex j."""
    verts = g.vertices
    index = {v: i for i, v in enumerate(verts)}
    n = len(verts)
    mat = [[0] * n for _ in range(n)]
    for e in g.edges:
        a, b = g.ends(e)
        if a == b:
            continue
        i, j = index[a], index[b]
        # firing vertex j sends one chip along each edge at j
        mat[i][j] += 1
        mat[j][i] += 1
        mat[i][i] -= 1
        mat[j][j] -= 1
    return mat


def lattice_solvable(mat: list[list[int]], vec: list[int]) -> bool:
    """Does mat @ x = vec have an integer solution?

    Diagonalizes with integer row and column operations; row operations
    are mirrored on vec, column operations only reparametrize x.
    """
    a = [list(map(int, row)) for row in mat]
    b = list(map(int, vec))
    rows = len(a)
    cols = len(a[0]) if rows else 0
    r = 0
    while r < rows and r < cols:
        piv = None
        for i in range(r, rows):
            for j in range(r, cols):
                if a[i][j] and (piv is None
                                or abs(a[i][j]) < abs(a[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        i0, j0 = piv
        a[r], a[i0] = a[i0], a[r]
        b[r], b[i0] = b[i0], b[r]
        for row in a:
            row[r], row[j0] = row[j0], row[r]
        dirty = False
        for i in range(r + 1, rows):
            if a[i][r]:
                q = a[i][r] // a[r][r]
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                b[i] -= q * b[r]
                if a[i][r]:
                    dirty = True
        for j in range(r + 1, cols):
            if a[r][j]:
                q = a[r][j] // a[r][r]
                for row in a:
                    row[j] -= q * row[r]
                if a[r][j]:
                    dirty = True
        if dirty:
            continue
        r += 1
    for i in range(rows):
        if i < r:
            if b[i] % a[i][i]:
                return False
        elif b[i]:
            return False
    return True


def equivalent_oracle(d1: Divisor, d2: Divisor) -> bool:
    """d1 ~ d2 iff their difference lies in the Laplacian image lattice."""
    g = d1.graph
    if d1.degree() != d2.degree():
        return False
    diff = [d2[v] - d1[v] for v in g.vertices]
    return lattice_solvable(laplacian_image_matrix(g), diff)


# ---------------------------------------------------------------------------
# q-reduced, straight from the definition

def q_reduced_oracle(d: Divisor, q: str) -> bool:
    """Nonnegative away from q, and every nonempty set avoiding q would go
    negative somewhere if fired."""
    g = d.graph
    others = [v for v in g.vertices if v != q]
    if any(d[v] < 0 for v in others):
        return False
    for size in range(1, len(others) + 1):
        for subset in itertools.combinations(others, size):
            s = set(subset)
            fires = True
            for v in subset:
                out = 0
                for e in g.edges:
                    a, b = g.ends(e)
                    if a == b:
                        continue
                    if a == v and b not in s:
                        out += 1
                    elif b == v and a not in s:
                        out += 1
                if d[v] - out < 0:
                    fires = False
                    break
            if fires:
                return False
    return True


# ---------------------------------------------------------------------------
# exhaustive connected multigraphs (no loops; the Laplacian ignores them)

def connected_multigraphs(max_vertices: int = 5, max_edges: int = 7):
    """All connected loop-free multigraphs up to isomorphism, as RealGraphs
    with the identity involution.  Deduplicated by keeping only the
    lexicographically least edge multiset over all vertex permutations."""
    for n in range(1, max_vertices + 1):
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        perms = list(itertools.permutations(range(n)))
        low = 0 if n == 1 else n - 1
        for total in range(low, max_edges + 1):
            if n == 1 and total > 0:
                break
            for combo in itertools.combinations_with_replacement(
                    range(len(pairs)), total):
                edge_list = tuple(pairs[k] for k in combo)
                if n > 1 and not _spans(n, edge_list):
                    continue
                if not _is_canonical(edge_list, perms):
                    continue
                ends = {f"e{k}": (f"v{a}", f"v{b}")
                        for k, (a, b) in enumerate(edge_list)}
                yield validate([f"v{i}" for i in range(n)], ends)


def _spans(n: int, edge_list) -> bool:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edge_list:
        parent[find(a)] = find(b)
    return len({find(i) for i in range(n)}) == 1


def _is_canonical(edge_list, perms) -> bool:
    ref = tuple(sorted(edge_list))
    for perm in perms:
        mapped = tuple(sorted(tuple(sorted((perm[a], perm[b])))
                              for a, b in edge_list))
        if mapped < ref:
            return False
    return True


# ---------------------------------------------------------------------------
# isomorphism of graphs with real structure

def _encode(g: RealGraph) -> nx.Graph:
    out = nx.Graph()
    for v in g.vertices:
        out.add_node(("v", v), kind="vertex", tag=g.is_real_vertex(v),
                     loop=False)
    for e in g.edges:
        a, b = g.ends(e)
        if g.sigma_e(e) == e:
            tag = "isolated" if g.is_isolated_real_edge(e) else "fixed"
        else:
            tag = "pair"
        out.add_node(("e", e), kind="edge", tag=tag, loop=a == b)
        out.add_edge(("e", e), ("v", a), color="incidence")
        out.add_edge(("e", e), ("v", b), color="incidence")
    for v in g.vertices:
        w = g.sigma_v(v)
        if v < w:
            out.add_edge(("v", v), ("v", w), color="sigma")
    for e in g.edges:
        f = g.sigma_e(e)
        if e < f:
            out.add_edge(("e", e), ("e", f), color="sigma")
    return out


def real_isomorphic(g1: RealGraph, g2: RealGraph) -> bool:
    """Isomorphism of multigraphs respecting incidence and the involution."""
    if len(g1.vertices) != len(g2.vertices) or len(g1.edges) != len(g2.edges):
        return False
    nm = isomorphism.categorical_node_match(["kind", "tag", "loop"],
                                            [None, None, None])
    em = isomorphism.categorical_edge_match("color", None)
    return isomorphism.GraphMatcher(_encode(g1), _encode(g2),
                                    node_match=nm, edge_match=em).is_isomorphic()
