"""Exact satisfiability decision, brute-force oracle and implication analysis.

The decision procedure is complete backtracking with min-remaining-values
variable selection (ties broken by higher constraint degree, then id; values
tried ascending) and generalized arc consistency re-established after every
decision.  Domains are bitmasks, connected components of the constraint
graph are solved independently, and binary constraints use precomputed
mask-to-mask propagation tables.  The degree tie-break matters: on coloring
instances near their transition, id-order ties thrash by orders of
magnitude.  An optional node budget bounds the number of value
assignments tried; exceeding it raises BudgetExceeded so that callers can
account for indeterminate runs instead of silently dropping them.
"""

from __future__ import annotations

import sys
from collections import deque
from dataclasses import dataclass, field
from itertools import product

from .model import Assignment, ConstraintDistribution, CspInstance

DEFAULT_NODE_BUDGET = 10_000_000
DEFAULT_ENUMERATION_CAP = 20_000_000


class BudgetExceeded(RuntimeError):
    """The backtracking node budget was exhausted before a decision."""


class EnumerationCapExceeded(RuntimeError):
    """Brute force refused: the domain product exceeds the cap."""


def _mask_of(domain: frozenset[int]) -> int:
    m = 0
    for v in domain:
        m |= 1 << (v - 1)
    return m


def _values_of(mask: int) -> list[int]:
    out = []
    v = 1
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return out


# ---------------------------------------------------------------------------
# propagation engines
# ---------------------------------------------------------------------------

def _binary_tables(tpl, d: int) -> tuple[list[int], list[int]]:
    """Mask-indexed propagation tables for a binary template.

    fwd[mask of slot-1 values] = mask of slot-2 values compatible with at
    least one of them; bwd is the same for the opposite direction.
    """
    full = 1 << d
    sup_fwd = [0] * (d + 1)
    sup_bwd = [0] * (d + 1)
    for a in range(1, d + 1):
        for b in range(1, d + 1):
            if (a, b) not in tpl.restrictions:
                sup_fwd[a] |= 1 << (b - 1)
                sup_bwd[b] |= 1 << (a - 1)
    fwd = [0] * full
    bwd = [0] * full
    for m in range(1, full):
        low = (m & -m).bit_length()
        fwd[m] = fwd[m & (m - 1)] | sup_fwd[low]
        bwd[m] = bwd[m & (m - 1)] | sup_bwd[low]
    return fwd, bwd


class _Budget:
    __slots__ = ("nodes", "limit")

    def __init__(self, limit: int | None) -> None:
        self.nodes = 0
        self.limit = limit

    def spend(self) -> None:
        self.nodes += 1
        if self.limit is not None and self.nodes > self.limit:
            raise BudgetExceeded(f"node budget {self.limit} exhausted")


class _BinaryEngine:
    """MRV + AC-3 over bitmask domains, specialized to k = 2."""

    def __init__(self, instance: CspInstance) -> None:
        d = instance.domain_size
        self.masks = [0] + [_mask_of(dom) for dom in instance.domains]
        self.degree = [0] * (instance.n + 1)
        tables = [_binary_tables(t, d) for t in instance.templates]
        self.adj: list[list[tuple[int, list[int]]]] = [[] for _ in range(instance.n + 1)]
        for (a, b), tid in instance.constraints:
            fwd, bwd = tables[tid]
            if a == b:
                # degenerate self-pair: keep only values v with (v, v) allowed
                diag = 0
                for v in range(1, d + 1):
                    if fwd[1 << (v - 1)] >> (v - 1) & 1:
                        diag |= 1 << (v - 1)
                self.masks[a] &= diag
                continue
            self.adj[a].append((b, fwd))
            self.adj[b].append((a, bwd))
            self.degree[a] += 1
            self.degree[b] += 1
        self.trail: list[tuple[int, int]] = []

    def propagate(self, var: int) -> bool:
        masks = self.masks
        adj = self.adj
        trail = self.trail
        stack = [var]
        while stack:
            x = stack.pop()
            mx = masks[x]
            for y, table in adj[x]:
                my = masks[y]
                new = my & table[mx]
                if new != my:
                    if not new:
                        return False
                    trail.append((y, my))
                    masks[y] = new
                    stack.append(y)
        return True

    def establish(self, comp: list[int]) -> bool:
        return all(self.propagate(v) for v in comp)

    def solve_component(self, comp: list[int], budget: _Budget) -> bool:
        return _dfs_component(self, comp, budget)


class _GeneralEngine:
    """MRV + generalized arc consistency for arbitrary arity."""

    def __init__(self, instance: CspInstance) -> None:
        self.masks = [0] + [_mask_of(dom) for dom in instance.domains]
        self.degree = [0] * (instance.n + 1)
        allowed = [tuple(t.allowed_tuples()) for t in instance.templates]
        self.constraints = [(vs, allowed[tid]) for vs, tid in instance.constraints]
        self.incident: list[list[int]] = [[] for _ in range(instance.n + 1)]
        for i, (vs, _) in enumerate(self.constraints):
            for v in set(vs):
                self.incident[v].append(i)
                self.degree[v] += 1
        self.trail: list[tuple[int, int]] = []

    def _revise(self, ci: int) -> list[int] | None:
        vs, allowed = self.constraints[ci]
        masks = self.masks
        acc = {v: 0 for v in set(vs)}
        for tup in allowed:
            ok = True
            for v, val in zip(vs, tup):
                if not masks[v] >> (val - 1) & 1:
                    ok = False
                    break
            if ok:
                for v, val in zip(vs, tup):
                    acc[v] |= 1 << (val - 1)
        changed = []
        for v, mask in acc.items():
            new = masks[v] & mask
            if new != masks[v]:
                if not new:
                    return None
                self.trail.append((v, masks[v]))
                masks[v] = new
                changed.append(v)
        return changed

    def propagate(self, var: int) -> bool:
        queue = deque(self.incident[var])
        queued = set(queue)
        while queue:
            ci = queue.popleft()
            queued.discard(ci)
            changed = self._revise(ci)
            if changed is None:
                return False
            for v in changed:
                for cj in self.incident[v]:
                    if cj != ci and cj not in queued:
                        queue.append(cj)
                        queued.add(cj)
        return True

    def establish(self, comp: list[int]) -> bool:
        return all(self.propagate(v) for v in comp)

    def solve_component(self, comp: list[int], budget: _Budget) -> bool:
        return _dfs_component(self, comp, budget)


def _dfs_component(engine, comp: list[int], budget: _Budget) -> bool:
    """Backtracking over one component: min-remaining-values variable choice
    with ties broken by higher constraint degree then lower id, values tried
    ascending.  Each value try costs one budget node."""
    masks = engine.masks
    trail = engine.trail
    degree = engine.degree

    def dfs() -> bool:
        best = 0
        best_count = 1 << 30
        best_degree = -1
        for v in comp:
            c = masks[v].bit_count()
            if c > 1 and (c < best_count or
                          (c == best_count and degree[v] > best_degree)):
                best, best_count, best_degree = v, c, degree[v]
        if not best:
            return True
        m = masks[best]
        saved = m
        while m:
            bit = m & -m
            m ^= bit
            budget.spend()
            mark = len(trail)
            trail.append((best, saved))
            masks[best] = bit
            if engine.propagate(best) and dfs():
                return True
            while len(trail) > mark:
                y, old = trail.pop()
                masks[y] = old
        return False

    return dfs()


def _components(instance: CspInstance) -> list[list[int]]:
    """Connected variable components of the constraint graph, constrained
    variables only; each component sorted ascending."""
    parent = list(range(instance.n + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    seen = set()
    for vs, _ in instance.constraints:
        seen.update(vs)
        for v in vs[1:]:
            ra, rb = find(vs[0]), find(v)
            if ra != rb:
                parent[rb] = ra
    comps: dict[int, list[int]] = {}
    for v in sorted(seen):
        comps.setdefault(find(v), []).append(v)
    return list(comps.values())


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def solve(instance: CspInstance, *, max_nodes: int | None = DEFAULT_NODE_BUDGET
          ) -> Assignment | None:
    """A satisfying assignment, or None if the instance is unsatisfiable.

    Complete and deterministic.  Raises BudgetExceeded when the node budget
    runs out before the instance is decided.
    """
    if instance.trivially_unsatisfiable:
        return None
    if instance.n > 900:
        sys.setrecursionlimit(max(sys.getrecursionlimit(), 3 * instance.n + 200))
    engine = (_BinaryEngine if instance.arity == 2 and instance.domain_size <= 16
              else _GeneralEngine)(instance)
    budget = _Budget(max_nodes)
    comps = _components(instance)
    for comp in comps:
        if not engine.establish(comp):
            return None
    for comp in comps:
        if not engine.solve_component(comp, budget):
            return None
    assignment: Assignment = {}
    constrained = {v for comp in comps for v in comp}
    for v in range(1, instance.n + 1):
        if v in constrained:
            assignment[v] = engine.masks[v].bit_length()
        else:
            assignment[v] = min(instance.domains[v - 1])
    return assignment


def brute_force(instance: CspInstance, *, cap: int = DEFAULT_ENUMERATION_CAP
                ) -> Assignment | None:
    """Exhaustive oracle; returns the lexicographically smallest witness."""
    if instance.trivially_unsatisfiable:
        return None
    size = 1
    for dom in instance.domains:
        size *= len(dom)
        if size > cap:
            raise EnumerationCapExceeded(f"domain product exceeds cap {cap}")
    choices = [sorted(dom) for dom in instance.domains]
    cons = [(tuple(v - 1 for v in vs), instance.templates[tid].restrictions)
            for vs, tid in instance.constraints]
    for combo in product(*choices):
        if all(tuple(combo[i] for i in pos) not in restr for pos, restr in cons):
            return {v: combo[v - 1] for v in range(1, instance.n + 1)}
    return None


def solve_excluding_value(instance: CspInstance, delta: int, *,
                          max_nodes: int | None = DEFAULT_NODE_BUDGET
                          ) -> Assignment | None:
    """Solve with the value delta removed from every domain."""
    if not 1 <= delta <= instance.domain_size:
        raise ValueError(f"value {delta} outside 1..{instance.domain_size}")
    domains = tuple(dom - {delta} for dom in instance.domains)
    reduced = CspInstance(instance.n, instance.domain_size, instance.arity,
                          instance.templates, instance.constraints, domains)
    return solve(reduced, max_nodes=max_nodes)


def count_solutions(instance: CspInstance, cap: int, *,
                    enumeration_cap: int = DEFAULT_ENUMERATION_CAP) -> int:
    """Number of satisfying assignments, saturated at cap."""
    if instance.trivially_unsatisfiable:
        return 0
    size = 1
    for dom in instance.domains:
        size *= len(dom)
        if size > enumeration_cap:
            raise EnumerationCapExceeded(f"domain product exceeds cap {enumeration_cap}")
    choices = [sorted(dom) for dom in instance.domains]
    cons = [(tuple(v - 1 for v in vs), instance.templates[tid].restrictions)
            for vs, tid in instance.constraints]
    count = 0
    for combo in product(*choices):
        if all(tuple(combo[i] for i in pos) not in restr for pos, restr in cons):
            count += 1
            if count >= cap:
                return cap
    return count


# ---------------------------------------------------------------------------
# implication closures and bad values (binary instances)
# ---------------------------------------------------------------------------

ChainStep = tuple[int, int, int]  # (constraint index, from variable, from value)


@dataclass(frozen=True)
class ImplicationClosure:
    """Everything forced by assigning one value to one variable.

    `forced` maps each reached variable u to the unique value it must take;
    `chains[u]` records the constraint steps certifying it.  The source
    variable itself is never a member.  If two chains force different values
    on one variable the closure stops expanding through it and `truncated`
    is set; a constraint leaving zero compatible values is recorded in
    `dead_ends` rather than as a forcing step.
    """

    source_var: int
    source_value: int
    forced: dict[int, int]
    chains: dict[int, tuple[ChainStep, ...]]
    truncated: bool
    dead_ends: tuple[tuple[int, int, int], ...]

    def members(self, gamma: int) -> frozenset[int]:
        """F_{delta,gamma}: variables forced to the value gamma."""
        return frozenset(u for u, g in self.forced.items() if g == gamma)

    @property
    def size(self) -> int:
        return len(self.forced)


def _forced_value(tpl, fixed_slot: int, value: int) -> int | None:
    """The single compatible value of the other slot, 0 if contradictory,
    None if two or more values remain."""
    found = None
    for other in range(1, tpl.domain_size + 1):
        pair = (value, other) if fixed_slot == 0 else (other, value)
        if pair not in tpl.restrictions:
            if found is not None:
                return None
            found = other
    return found if found is not None else 0


def implication_closure(instance: CspInstance, var: int, delta: int) -> ImplicationClosure:
    """Breadth-first closure of the forcing relation from (var, delta).

    A constraint on an ordered pair forces the partner variable exactly when
    a single compatible value remains for it, judged against the template in
    its stored orientation over the full value range 1..d (per-variable
    domain restrictions are deliberately not consulted).
    """
    if instance.arity != 2:
        raise ValueError("implication closures are defined for k = 2 only")
    if not 1 <= var <= instance.n:
        raise ValueError(f"variable {var} outside 1..{instance.n}")
    if not 1 <= delta <= instance.domain_size:
        raise ValueError(f"value {delta} outside 1..{instance.domain_size}")
    incident: list[list[int]] = [[] for _ in range(instance.n + 1)]
    for i, (vs, _) in enumerate(instance.constraints):
        for v in set(vs):
            incident[v].append(i)
    forced: dict[int, int] = {}
    chains: dict[int, tuple[ChainStep, ...]] = {var: ()}
    truncated = False
    dead: list[tuple[int, int, int]] = []
    values = {var: delta}
    queue = deque([var])
    while queue:
        x = queue.popleft()
        val = values[x]
        for ci in incident[x]:
            (a, b), tid = instance.constraints[ci]
            if a == b:
                continue
            partner, slot = (b, 0) if x == a else (a, 1)
            gamma = _forced_value(instance.templates[tid], slot, val)
            if gamma is None:
                continue
            if gamma == 0:
                dead.append((x, val, ci))
                continue
            if partner == var:
                if gamma != delta:
                    truncated = True
                continue
            if partner in forced:
                if forced[partner] != gamma:
                    truncated = True
                continue
            forced[partner] = gamma
            values[partner] = gamma
            chains[partner] = chains[x] + ((ci, x, val),)
            queue.append(partner)
    chains.pop(var)
    return ImplicationClosure(var, delta, forced, chains, truncated, tuple(dead))


def template_forcing_edges(dist: ConstraintDistribution
                           ) -> dict[tuple[int, int], bool]:
    """Support-level forcing relation: (delta, gamma) -> True iff some support
    template, in either orientation, forces gamma from delta."""
    if dist.arity != 2:
        raise ValueError("forcing relation is defined for k = 2 only")
    d = dist.domain_size
    edges: dict[tuple[int, int], bool] = {}
    for tpl in dist.templates:
        for delta in range(1, d + 1):
            for slot in (0, 1):
                gamma = _forced_value(tpl, slot, delta)
                if gamma:
                    edges[(delta, gamma)] = True
    return edges


def bad_values(dist: ConstraintDistribution) -> frozenset[int]:
    """Values forbidden outright by some support template, closed under the
    support-level forcing relation."""
    if dist.arity != 2:
        raise ValueError("bad values are defined for k = 2 only")
    d = dist.domain_size
    bad = set()
    for tpl in dist.templates:
        for delta in range(1, d + 1):
            for slot in (0, 1):
                if _forced_value(tpl, slot, delta) == 0:
                    bad.add(delta)
    edges = template_forcing_edges(dist)
    changed = True
    while changed:
        changed = False
        for (delta, gamma) in edges:
            if gamma in bad and delta not in bad:
                bad.add(delta)
                changed = True
    return frozenset(bad)
