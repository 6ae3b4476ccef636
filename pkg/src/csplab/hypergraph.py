"""Constraint hypergraphs: components, cycles, distances, contraction.

A hypergraph has vertices 1..n and a list of hyperedges, each an ordered
vertex tuple.  Repeats inside a tuple are allowed (loops arise from
contraction); multiple edges on the same vertex set are allowed (they arise
from the hat-model sampler).

Cycle structure is read off the bipartite incidence multigraph between
vertices and hyperedges: a connected component is acyclic iff its incidence
edge count equals vertices + hyperedges - 1, and unicyclic iff the excess is
exactly one.  Degenerate configurations -- parallel edges, two hyperedges
sharing two or more vertices, a vertex repeated inside an edge -- all count
as cycles, and a loop counts as a cycle of size one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable

from .rng import derive_seed, make_rng

if TYPE_CHECKING:  # pragma: no cover
    from .model import CspInstance


@dataclass(frozen=True)
class Hypergraph:
    n: int
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        es = tuple(tuple(int(v) for v in e) for e in self.edges)
        for e in es:
            if not e:
                raise ValueError("empty hyperedge")
            if any(not 1 <= v <= self.n for v in e):
                raise ValueError(f"hyperedge {e} references vertices outside 1..{self.n}")
        object.__setattr__(self, "edges", es)

    @property
    def is_simple(self) -> bool:
        """No vertex repeated inside an edge, no two edges equal as sets."""
        seen = set()
        for e in self.edges:
            if len(set(e)) != len(e):
                return False
            key = frozenset(e)
            if key in seen:
                return False
            seen.add(key)
        return True


def constraint_hypergraph(instance: "CspInstance") -> Hypergraph:
    """One hyperedge per constraint, multiplicity preserved."""
    return Hypergraph(instance.n, tuple(vs for vs, _ in instance.constraints))


# ---------------------------------------------------------------------------
# components and cycle classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Component:
    vertices: frozenset[int]
    edge_indices: tuple[int, ...]
    excess: int

    @property
    def kind(self) -> str:
        if self.excess == 0:
            return "tree"
        if self.excess == 1:
            return "unicyclic"
        return "multicyclic"


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def classify_components(h: Hypergraph) -> list[Component]:
    """Split into connected components and label each tree/unicyclic/multicyclic.

    The excess of a component with V vertices, E hyperedges and S total
    vertex slots (counted with multiplicity) is S - V - E + 1; excess zero
    means acyclic, excess one means exactly one cycle.
    """
    uf = _UnionFind(h.n + 1)
    for e in h.edges:
        for v in e[1:]:
            uf.union(e[0], v)
    comp_vertices: dict[int, set[int]] = {}
    for v in range(1, h.n + 1):
        comp_vertices.setdefault(uf.find(v), set()).add(v)
    comp_edges: dict[int, list[int]] = {root: [] for root in comp_vertices}
    comp_slots: dict[int, int] = {root: 0 for root in comp_vertices}
    for i, e in enumerate(h.edges):
        root = uf.find(e[0])
        comp_edges[root].append(i)
        comp_slots[root] += len(e)
    out = []
    for root, verts in comp_vertices.items():
        excess = comp_slots[root] - len(verts) - len(comp_edges[root]) + 1
        out.append(Component(frozenset(verts), tuple(comp_edges[root]), excess))
    out.sort(key=lambda c: min(c.vertices))
    return out


def is_unicyclic(h: Hypergraph) -> bool:
    """Exactly one cycle in the whole hypergraph (other components are trees)."""
    kinds = [c.kind for c in classify_components(h)]
    return kinds.count("unicyclic") == 1 and kinds.count("multicyclic") == 0


# ---------------------------------------------------------------------------
# distances and neighbourhoods
# ---------------------------------------------------------------------------

def _incidence(h: Hypergraph) -> list[list[int]]:
    inc: list[list[int]] = [[] for _ in range(h.n + 1)]
    for i, e in enumerate(h.edges):
        for v in set(e):
            inc[v].append(i)
    return inc


def distances_from(h: Hypergraph, sources: Iterable[int]) -> dict[int, int]:
    """BFS walk-length distances from a vertex set; a source has distance 0."""
    from collections import deque

    inc = _incidence(h)
    dist = {int(v): 0 for v in sources}
    queue = deque(sorted(dist))
    while queue:
        v = queue.popleft()
        for ei in inc[v]:
            for u in h.edges[ei]:
                if u not in dist:
                    dist[u] = dist[v] + 1
                    queue.append(u)
    return dist


def distance(h: Hypergraph, sources: Iterable[int] | int, target: int) -> float:
    """Minimum walk length from any source vertex to the target, or inf."""
    if isinstance(sources, int):
        sources = [sources]
    return distances_from(h, sources).get(target, math.inf)


def vertices_within(h: Hypergraph, sources: Iterable[int], radius: int) -> frozenset[int]:
    return frozenset(v for v, d in distances_from(h, sources).items() if d <= radius)


def contract(h: Hypergraph, u: int, v: int) -> Hypergraph:
    """Merge u and v into a new vertex; edges may then contain repeats.

    Remaining vertices are renumbered densely in increasing order and the
    merged vertex becomes the highest id, n - 1.
    """
    if u == v:
        raise ValueError("cannot contract a vertex with itself")
    if not (1 <= u <= h.n and 1 <= v <= h.n):
        raise ValueError(f"vertices {u}, {v} outside 1..{h.n}")
    new_id = {}
    nxt = 1
    for x in range(1, h.n + 1):
        if x not in (u, v):
            new_id[x] = nxt
            nxt += 1
    w = nxt  # == h.n - 1
    new_id[u] = new_id[v] = w
    edges = tuple(tuple(new_id[x] for x in e) for e in h.edges)
    return Hypergraph(h.n - 1, edges)


@dataclass(frozen=True)
class NeighborhoodReport:
    hits_constraint_with_two_t_vars: bool
    ball_is_forest: bool
    ball_size: int


def neighborhood_forest_check(instance: "CspInstance", t_vars: Iterable[int],
                              radius: int) -> NeighborhoodReport:
    """Local-structure diagnostics around a variable set T.

    Reports whether some constraint contains two or more variables of T,
    whether the sub-hypergraph induced on the radius-r ball around T is a
    forest, and the ball size.
    """
    h = constraint_hypergraph(instance)
    t_set = {int(v) for v in t_vars}
    hits = any(len(t_set.intersection(e)) >= 2 for e in h.edges)
    ball = vertices_within(h, t_set, radius)
    inner = tuple(e for e in h.edges if set(e) <= ball)
    induced = Hypergraph(h.n, inner)
    forest = all(c.kind == "tree" for c in classify_components(induced))
    return NeighborhoodReport(hits, forest, len(ball))


# ---------------------------------------------------------------------------
# random structures
# ---------------------------------------------------------------------------

def random_unicyclic_hypergraph(k: int, cycle_len: int, tree_edges: int,
                                seed: int) -> Hypergraph:
    """A random connected k-uniform hypergraph with exactly one cycle.

    Built as a cycle of `cycle_len` hyperedges (consecutive edges share one
    spine vertex, each edge padded with k-2 fresh vertices) plus `tree_edges`
    extra hyperedges each attached at a single random existing vertex.
    Vertex labels and the order inside each edge are randomized.
    """
    if k < 2:
        raise ValueError("need k >= 2")
    min_cycle = 3 if k == 2 else 2
    if cycle_len < min_cycle:
        raise ValueError(f"cycle of {cycle_len} edges impossible for k = {k}")
    rng = make_rng(seed)
    spine = list(range(cycle_len))
    nxt = cycle_len
    edges = []
    for i in range(cycle_len):
        e = [spine[i], spine[(i + 1) % cycle_len]]
        for _ in range(k - 2):
            e.append(nxt)
            nxt += 1
        edges.append(e)
    for _ in range(tree_edges):
        anchor = int(rng.integers(0, nxt))
        e = [anchor]
        for _ in range(k - 1):
            e.append(nxt)
            nxt += 1
        edges.append(e)
    relabel = [int(x) + 1 for x in rng.permutation(nxt)]
    shuffled = []
    for e in edges:
        order = rng.permutation(len(e))
        shuffled.append(tuple(relabel[e[j]] for j in order))
    return Hypergraph(nxt, tuple(shuffled))


def random_unicyclic_graph(cycle_len: int, tree_edges: int, seed: int) -> Hypergraph:
    return random_unicyclic_hypergraph(2, cycle_len, tree_edges, seed)
