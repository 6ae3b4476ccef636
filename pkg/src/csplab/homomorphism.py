"""Hypergraph homomorphism search and constructive mappings for unicyclic inputs.

A homomorphism from G to H maps vertices of G to vertices of H so that the
image of every G-hyperedge is a hyperedge of H.  Undirected targets store the
symmetric closure of their edge list, so membership checks are order-free.
Every mapping produced here is re-verified edge by edge before it is
returned.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import permutations

from .hypergraph import Hypergraph, classify_components, distances_from

Mapping_ = dict[int, int]


@dataclass(frozen=True)
class TargetHypergraph:
    """Fixed k-uniform target; hyperedges are ordered tuples, loops allowed."""

    n: int
    arity: int
    edges: tuple[tuple[int, ...], ...]
    directed: bool = False
    edge_lookup: frozenset[tuple[int, ...]] = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("target needs at least one vertex")
        es = tuple(tuple(int(v) for v in e) for e in self.edges)
        for e in es:
            if len(e) != self.arity:
                raise ValueError(f"hyperedge {e} does not have arity {self.arity}")
            if any(not 1 <= v <= self.n for v in e):
                raise ValueError(f"hyperedge {e} references vertices outside 1..{self.n}")
        object.__setattr__(self, "edges", es)
        if self.directed:
            lookup = frozenset(es)
        else:
            lookup = frozenset(p for e in es for p in permutations(e))
        object.__setattr__(self, "edge_lookup", lookup)

    @property
    def loopless(self) -> bool:
        return all(len(set(e)) > 1 for e in self.edges)

    def permits(self, values: tuple[int, ...]) -> bool:
        return values in self.edge_lookup


def single_edge_target(k: int) -> TargetHypergraph:
    return TargetHypergraph(k, k, (tuple(range(1, k + 1)),))


def complete_graph_target(c: int) -> TargetHypergraph:
    edges = tuple((a, b) for a in range(1, c + 1) for b in range(a + 1, c + 1))
    return TargetHypergraph(c, 2, edges)


def cycle_graph_target(m: int) -> TargetHypergraph:
    edges = tuple((i, i % m + 1) for i in range(1, m + 1))
    return TargetHypergraph(m, 2, edges)


def _adjacency(h: TargetHypergraph) -> list[set[int]]:
    if h.arity != 2:
        raise ValueError("adjacency only defined for k = 2 targets")
    adj: list[set[int]] = [set() for _ in range(h.n + 1)]
    for a, b in h.edge_lookup:
        if a != b:
            adj[a].add(b)
            adj[b].add(a)
    return adj


def has_triangle(h: TargetHypergraph) -> bool:
    """Three mutually adjacent distinct vertices (k = 2 targets only)."""
    adj = _adjacency(h)
    for a in range(1, h.n + 1):
        for b in adj[a]:
            if b <= a:
                continue
            if any(c > b for c in adj[a] & adj[b]):
                return True
    return False


def _first_triangle(h: TargetHypergraph) -> tuple[int, int, int]:
    adj = _adjacency(h)
    for a in range(1, h.n + 1):
        for b in sorted(adj[a]):
            if b <= a:
                continue
            common = sorted(c for c in adj[a] & adj[b] if c > b)
            if common:
                return a, b, common[0]
    raise ValueError("target contains no triangle")


def verify_homomorphism(g: Hypergraph, h: TargetHypergraph, mapping: Mapping_) -> bool:
    for v in range(1, g.n + 1):
        if not 1 <= mapping.get(v, 0) <= h.n:
            return False
    return all(tuple(mapping[v] for v in e) in h.edge_lookup for e in g.edges)


# ---------------------------------------------------------------------------
# existence search
# ---------------------------------------------------------------------------

def has_homomorphism(g: Hypergraph, h: TargetHypergraph) -> Mapping_ | None:
    """Find a homomorphism from g to h, or None.

    Backtracking over g's vertices in descending-degree order (ties by id),
    values tried in target-vertex order, with generalized arc consistency
    re-established after every assignment.  Deterministic, so witnesses are
    reproducible.
    """
    for e in g.edges:
        if len(e) != h.arity:
            raise ValueError(f"edge {e} has arity {len(e)}, target expects {h.arity}")
    if not h.edge_lookup and g.edges:
        return None
    full = (1 << h.n) - 1
    cand = [full] * (g.n + 1)
    incident: list[list[int]] = [[] for _ in range(g.n + 1)]
    for i, e in enumerate(g.edges):
        for v in set(e):
            incident[v].append(i)

    def revise(edge_index: int) -> list[int] | None:
        """Shrink candidate masks on one edge; returns changed vertices."""
        e = g.edges[edge_index]
        acc = {v: 0 for v in set(e)}
        for tup in h.edge_lookup:
            if all(cand[v] >> (tup[i] - 1) & 1 for i, v in enumerate(e)):
                for i, v in enumerate(e):
                    acc[v] |= 1 << (tup[i] - 1)
        changed = []
        for v, mask in acc.items():
            new = cand[v] & mask
            if new != cand[v]:
                cand[v] = new
                if not new:
                    return None
                changed.append(v)
        return changed

    def propagate(seed_edges: list[int]) -> bool:
        queue = deque(seed_edges)
        queued = set(seed_edges)
        while queue:
            ei = queue.popleft()
            queued.discard(ei)
            changed = revise(ei)
            if changed is None:
                return False
            for v in changed:
                for ej in incident[v]:
                    if ej != ei and ej not in queued:
                        queue.append(ej)
                        queued.add(ej)
        return True

    if not propagate(list(range(len(g.edges)))):
        return None

    degree = [0] * (g.n + 1)
    for e in g.edges:
        for v in set(e):
            degree[v] += 1
    order = sorted(range(1, g.n + 1), key=lambda v: (-degree[v], v))

    def dfs(pos: int) -> bool:
        if pos == len(order):
            return True
        v = order[pos]
        mask = cand[v]
        if mask.bit_count() == 1:
            return dfs(pos + 1)
        saved = cand.copy()
        m = mask
        while m:
            bit = m & -m
            m ^= bit
            cand[v] = bit
            if propagate(incident[v]) and dfs(pos + 1):
                return True
            cand[:] = saved
        return False

    if not dfs(0):
        return None
    mapping = {v: cand[v].bit_length() for v in range(1, g.n + 1)}
    if not verify_homomorphism(g, h, mapping):
        raise AssertionError("search produced an invalid mapping")
    return mapping


# ---------------------------------------------------------------------------
# the unique cycle of a unicyclic hypergraph
# ---------------------------------------------------------------------------

def find_unique_cycle(g: Hypergraph) -> tuple[list[int], list[int]]:
    """The cycle of a hypergraph with exactly one, as (vertices, edge indices).

    Peels degree-<=1 nodes off the bipartite incidence graph until only the
    cycle remains, then walks it.  Vertices come back in cyclic order
    v_0, ..., v_{r-1} with edge i joining v_{i-1} and v_i (edge r-1 closes
    the cycle back to v_0); the walk starts at the smallest cycle vertex.
    """
    for e in g.edges:
        if len(set(e)) != len(e):
            raise ValueError("cycle extraction expects edges without repeated vertices")
    comps = classify_components(g)
    if [c.kind for c in comps].count("unicyclic") != 1 or \
            any(c.kind == "multicyclic" for c in comps):
        raise ValueError("hypergraph does not have exactly one cycle")

    vdeg = {v: 0 for v in range(1, g.n + 1)}
    for e in g.edges:
        for v in e:
            vdeg[v] += 1
    esize = {i: len(e) for i, e in enumerate(g.edges)}
    alive_v = {v for v in vdeg if vdeg[v] > 0}
    alive_e = set(esize)
    queue: deque = deque()
    for v in alive_v:
        if vdeg[v] <= 1:
            queue.append(("v", v))
    for i in alive_e:
        if esize[i] <= 1:
            queue.append(("e", i))
    incident: dict[int, list[int]] = {v: [] for v in alive_v}
    for i, e in enumerate(g.edges):
        for v in e:
            incident[v].append(i)
    while queue:
        kind, x = queue.popleft()
        if kind == "v":
            if x not in alive_v or vdeg[x] > 1:
                continue
            alive_v.discard(x)
            for ei in incident[x]:
                if ei in alive_e:
                    esize[ei] -= 1
                    if esize[ei] <= 1:
                        queue.append(("e", ei))
        else:
            if x not in alive_e or esize[x] > 1:
                continue
            alive_e.discard(x)
            for v in g.edges[x]:
                if v in alive_v:
                    vdeg[v] -= 1
                    if vdeg[v] <= 1:
                        queue.append(("v", v))

    start = min(alive_v)
    verts = [start]
    edges: list[int] = []
    prev_edge = -1
    current = start
    while True:
        nxt_edge = min(ei for ei in incident[current] if ei in alive_e and ei != prev_edge)
        nxt_vertex = min(v for v in g.edges[nxt_edge] if v in alive_v and v != current)
        edges.append(nxt_edge)
        if nxt_vertex == start:
            break
        verts.append(nxt_vertex)
        prev_edge = nxt_edge
        current = nxt_vertex
    return verts, edges


# ---------------------------------------------------------------------------
# constructive mappings
# ---------------------------------------------------------------------------

def unicyclic_to_edge(g: Hypergraph) -> Mapping_:
    """Map a unicyclic k-uniform hypergraph (k >= 3) onto a single hyperedge.

    Cycle vertices v_0, ..., v_{r-1} go to targets 1, 2 alternating with
    v_{r-1} sent to 3; the rest of the hypergraph is a forest hanging off
    the cycle and is filled in greedily, each edge completing a bijection
    onto the k target vertices.
    """
    if not g.edges:
        raise ValueError("hypergraph has no edges")
    k = len(g.edges[0])
    if any(len(e) != k for e in g.edges):
        raise ValueError("hypergraph is not uniform")
    if k < 3:
        raise ValueError(f"construction requires k >= 3, got k = {k}")
    target = single_edge_target(k)
    cycle_vs, _ = find_unique_cycle(g)
    r = len(cycle_vs)
    mapping: Mapping_ = {}
    for i, v in enumerate(cycle_vs):
        mapping[v] = (i % 2) + 1 if i <= r - 2 else 3

    done: set[int] = set()
    while len(done) < len(g.edges):
        candidates = [i for i in range(len(g.edges)) if i not in done
                      and any(v in mapping for v in g.edges[i])]
        ei = min(candidates) if candidates else min(i for i in range(len(g.edges))
                                                    if i not in done)
        e = g.edges[ei]
        if not any(v in mapping for v in e):
            mapping[e[0]] = 1
        used = [mapping[v] for v in e if v in mapping]
        if len(set(used)) != len(used):
            raise AssertionError("cycle mapping collides inside an edge")
        free = [t for t in range(1, k + 1) if t not in used]
        for v in e:
            if v not in mapping:
                mapping[v] = free.pop(0)
        done.add(ei)
    for v in range(1, g.n + 1):
        mapping.setdefault(v, 1)
    if not verify_homomorphism(g, target, mapping):
        raise AssertionError("constructed mapping is not a homomorphism")
    return mapping


def ring_homomorphism(m: Hypergraph, h: TargetHypergraph, u: int, r: int) -> Mapping_:
    """Homomorphism from a unicyclic graph m to h sending every vertex at
    distance exactly r from m's cycle to the chosen target vertex u.

    Requires h connected with a triangle and r >= |V(h)| + 3.  The cycle is
    mapped onto a triangle of h; each branch vertex at depth j <= r follows a
    length-r walk from its anchor's image to u; deeper vertices extend
    greedily.
    """
    if any(len(e) != 2 for e in m.edges):
        raise ValueError("m must be a graph (k = 2)")
    if h.arity != 2:
        raise ValueError("target must be a graph (k = 2)")
    if not 1 <= u <= h.n:
        raise ValueError(f"vertex {u} outside 1..{h.n}")
    if r < h.n + 3:
        raise ValueError(f"need r >= |V(H)| + 3 = {h.n + 3}, got {r}")
    adj = _adjacency(h)
    if h.n > 1:
        undirected = tuple((a, b) for a, b in h.edge_lookup if a < b)
        if len(distances_from(Hypergraph(h.n, undirected), [1])) != h.n:
            raise ValueError("target must be connected")
    if not has_triangle(h):
        raise ValueError("target must contain a triangle")
    tri = _first_triangle(h)

    cycle_vs, _ = find_unique_cycle(m)
    rho = len(cycle_vs)
    mapping: Mapping_ = {}
    for i, v in enumerate(cycle_vs):
        mapping[v] = tri[i % 2] if i <= rho - 2 else tri[2]

    # vertex sets with a walk of length exactly j to u
    exact = [set() for _ in range(r + 1)]
    exact[0] = {u}
    for j in range(1, r + 1):
        exact[j] = {y for x in exact[j - 1] for y in adj[x]}
    walk_from: dict[int, list[int]] = {}
    for t in set(tri):
        if t not in exact[r]:
            raise ValueError(f"no walk of length {r} from {t} to {u} in the target")
        walk = [t]
        for j in range(1, r + 1):
            step = min(y for y in adj[walk[-1]] if y in exact[r - j])
            walk.append(step)
        walk_from[t] = walk

    dist = distances_from(m, cycle_vs)
    anchor = {v: v for v in cycle_vs}
    parent: dict[int, int] = {}
    madj: dict[int, set[int]] = {v: set() for v in range(1, m.n + 1)}
    for a, b in m.edges:
        madj[a].add(b)
        madj[b].add(a)
    order = deque(cycle_vs)
    seen = set(cycle_vs)
    bfs: list[int] = []
    while order:
        x = order.popleft()
        bfs.append(x)
        for y in sorted(madj[x]):
            if y not in seen:
                seen.add(y)
                parent[y] = x
                anchor[y] = anchor[x]
                order.append(y)
    for w in bfs:
        if w in mapping:
            continue
        j = dist[w]
        if j <= r:
            mapping[w] = walk_from[mapping[anchor[w]]][j]
        else:
            mapping[w] = min(adj[mapping[parent[w]]])
    for v in range(1, m.n + 1):
        if v not in mapping:
            if madj[v]:
                raise ValueError("m must be connected")
            mapping[v] = u  # isolated vertex
    if not verify_homomorphism(m, h, mapping):
        raise AssertionError("constructed mapping is not a homomorphism")
    return mapping
