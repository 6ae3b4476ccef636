"""Constraint templates, distributions, CSP instances and random samplers.

Conventions used throughout the package:

* variables are dense 1-based integers 1..n;
* values are 1-based integers 1..d;
* a constraint template over canonical slots X1..Xk is given by its set of
  *forbidden* value tuples (restrictions); a value tuple satisfies the
  template iff it is not forbidden;
* a constraint of an instance is an ordered variable tuple plus the index of
  a template in the instance's template table, so experiments can stratify
  statistics per template;
* one-variable constraints are represented as per-variable domain sets, not
  as arity-1 templates.  An instance with an empty domain is trivially
  unsatisfiable.

Two random models are provided.  In the *simple* model each unordered k-set
of variables independently receives one constraint with probability p; the
variables are then placed in uniformly random order and a template is drawn
from the distribution.  In the *hat* model every (ordered k-tuple, template)
pair is independently present with probability P(template) * p / k!, so the
same tuple may carry several constraints.  Both samplers draw the binomial
number of constraints first and then place them uniformly, which is
distributionally identical to the per-tuple Bernoulli process but runs in
O(#constraints) instead of O(n^k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .rng import derive_seed, make_rng

Assignment = dict[int, int]

PROB_SUM_TOL = 1e-12


# ---------------------------------------------------------------------------
# templates and distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstraintTemplate:
    """An arity-k, domain-d constraint given by its forbidden value tuples."""

    domain_size: int
    arity: int
    restrictions: frozenset[tuple[int, ...]]

    def __post_init__(self) -> None:
        if self.domain_size < 1:
            raise ValueError(f"domain_size must be >= 1, got {self.domain_size}")
        if self.arity < 1:
            raise ValueError(f"arity must be >= 1, got {self.arity}")
        rs = frozenset(tuple(int(v) for v in r) for r in self.restrictions)
        object.__setattr__(self, "restrictions", rs)
        for r in rs:
            if len(r) != self.arity:
                raise ValueError(f"restriction {r} does not have arity {self.arity}")
            if any(not 1 <= v <= self.domain_size for v in r):
                raise ValueError(f"restriction {r} has values outside 1..{self.domain_size}")

    @property
    def num_restrictions(self) -> int:
        return len(self.restrictions)

    def allowed_tuples(self) -> list[tuple[int, ...]]:
        """All permitted value tuples, in lexicographic order."""
        values = range(1, self.domain_size + 1)
        return [t for t in product(values, repeat=self.arity) if t not in self.restrictions]


def template_satisfied(template: ConstraintTemplate, values: Sequence[int]) -> bool:
    """True iff the value tuple is not one of the template's restrictions."""
    t = tuple(int(v) for v in values)
    if len(t) != template.arity:
        raise ValueError(f"expected {template.arity} values, got {len(t)}")
    if any(not 1 <= v <= template.domain_size for v in t):
        raise ValueError(f"values {t} outside 1..{template.domain_size}")
    return t not in template.restrictions


def _as_fraction(p: float | Fraction | int) -> Fraction:
    if isinstance(p, Fraction):
        return p
    if isinstance(p, int):
        return Fraction(p)
    return Fraction(float(p))  # exact binary value of the float


@dataclass(frozen=True)
class ConstraintDistribution:
    """A finite probability distribution over templates sharing one (d, k).

    Probabilities are stored as exact rationals so that serialization and
    repeated normalization cannot drift; floats are accepted and converted
    to their exact binary value.
    """

    templates: tuple[ConstraintTemplate, ...]
    probabilities: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        tpls = tuple(self.templates)
        probs = tuple(_as_fraction(p) for p in self.probabilities)
        object.__setattr__(self, "templates", tpls)
        object.__setattr__(self, "probabilities", probs)
        if not tpls:
            raise ValueError("distribution needs at least one template")
        if len(tpls) != len(probs):
            raise ValueError("templates and probabilities differ in length")
        d, k = tpls[0].domain_size, tpls[0].arity
        for t in tpls:
            if (t.domain_size, t.arity) != (d, k):
                raise ValueError("all templates must share the same (d, k)")
        if len(set(tpls)) != len(tpls):
            raise ValueError("duplicate templates in support")
        for p in probs:
            if not 0 < p <= 1:
                raise ValueError(f"probability {p} outside (0, 1]")
        if abs(float(sum(probs)) - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {float(sum(probs))}, not 1")

    @property
    def domain_size(self) -> int:
        return self.templates[0].domain_size

    @property
    def arity(self) -> int:
        return self.templates[0].arity

    def float_probabilities(self) -> np.ndarray:
        p = np.array([float(x) for x in self.probabilities])
        return p / p.sum()


# ---------------------------------------------------------------------------
# instances
# ---------------------------------------------------------------------------

Constraint = tuple[tuple[int, ...], int]


def _full_domains(n: int, d: int) -> tuple[frozenset[int], ...]:
    full = frozenset(range(1, d + 1))
    return tuple(full for _ in range(n))


@dataclass(frozen=True)
class CspInstance:
    """n variables with per-variable allowed-value sets plus ordered constraints.

    Constraints are kept in canonical order (sorted by variable tuple, then
    template index) so that identical (parameters, seed) pairs serialize to
    identical bytes and the solver behaves reproducibly.
    """

    n: int
    domain_size: int
    arity: int
    templates: tuple[ConstraintTemplate, ...]
    constraints: tuple[Constraint, ...]
    domains: tuple[frozenset[int], ...] | None = None

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("n must be >= 0")
        tpls = tuple(self.templates)
        object.__setattr__(self, "templates", tpls)
        for t in tpls:
            if (t.domain_size, t.arity) != (self.domain_size, self.arity):
                raise ValueError("template (d, k) does not match instance")
        cons = tuple((tuple(int(v) for v in vs), int(tid)) for vs, tid in self.constraints)
        for vs, tid in cons:
            if len(vs) != self.arity:
                raise ValueError(f"constraint {vs} does not have arity {self.arity}")
            if any(not 1 <= v <= self.n for v in vs):
                raise ValueError(f"constraint {vs} references variables outside 1..{self.n}")
            if not 0 <= tid < len(tpls):
                raise ValueError(f"constraint references unknown template {tid}")
        object.__setattr__(self, "constraints", tuple(sorted(cons)))
        if self.domains is None:
            object.__setattr__(self, "domains", _full_domains(self.n, self.domain_size))
        else:
            doms = tuple(frozenset(int(v) for v in dom) for dom in self.domains)
            if len(doms) != self.n:
                raise ValueError("need one domain per variable")
            for dom in doms:
                if any(not 1 <= v <= self.domain_size for v in dom):
                    raise ValueError("domain value outside 1..d")
            object.__setattr__(self, "domains", doms)

    @property
    def trivially_unsatisfiable(self) -> bool:
        return any(not dom for dom in self.domains)

    def template_of(self, constraint_index: int) -> ConstraintTemplate:
        return self.templates[self.constraints[constraint_index][1]]


def evaluate(instance: CspInstance, assignment: Mapping[int, int]) -> bool:
    """True iff the total assignment respects all domains and constraints."""
    for v in range(1, instance.n + 1):
        if v not in assignment:
            raise ValueError(f"assignment is missing variable {v}")
    for v in range(1, instance.n + 1):
        if assignment[v] not in instance.domains[v - 1]:
            return False
    for vs, tid in instance.constraints:
        values = tuple(assignment[v] for v in vs)
        if values in instance.templates[tid].restrictions:
            return False
    return True


# ---------------------------------------------------------------------------
# unranking helpers (lexicographic decode of sampled positions)
# ---------------------------------------------------------------------------

def _unrank_pair(rank: int, n: int) -> tuple[int, int]:
    """rank in [0, C(n,2)) -> the rank-th pair (a, b), 1 <= a < b <= n, lex order."""
    # pairs with first element < a:  S(a) = (a-1)(2n-a)/2
    a = max(1, int(n - 0.5 - math.sqrt(max((n - 0.5) ** 2 - 2 * rank, 0.0))))
    while a > 1 and (a - 1) * (2 * n - a) // 2 > rank:
        a -= 1
    while a * (2 * n - a - 1) // 2 <= rank:
        a += 1
    b = a + 1 + (rank - (a - 1) * (2 * n - a) // 2)
    return a, b


def _unrank_combination(rank: int, n: int, k: int) -> tuple[int, ...]:
    """rank in [0, C(n,k)) -> the rank-th ascending k-subset of 1..n, lex order."""
    if k == 2:
        return _unrank_pair(rank, n)
    out = []
    x = 1
    for slot in range(k, 0, -1):
        while True:
            block = math.comb(n - x, slot - 1)
            if rank < block:
                out.append(x)
                x += 1
                break
            rank -= block
            x += 1
    return tuple(out)


def _unrank_arrangement(rank: int, n: int, k: int) -> tuple[int, ...]:
    """rank in [0, n!/(n-k)!) -> the rank-th ordered k-tuple of distinct 1..n."""
    if k == 2:
        a, r = divmod(rank, n - 1)
        b = r if r < a else r + 1
        return a + 1, b + 1
    avail = list(range(1, n + 1))
    out = []
    for slot in range(k):
        block = math.perm(n - slot - 1, k - slot - 1)
        j, rank = divmod(rank, block)
        out.append(avail.pop(j))
    return tuple(out)


def _sample_distinct(rng: np.random.Generator, total: int, m: int) -> list[int]:
    """m distinct integers from [0, total), uniformly, sorted ascending."""
    if m >= total:
        return list(range(total))
    if m > total // 2:
        keep = set(range(total)) - set(_sample_distinct(rng, total, total - m))
        return sorted(keep)
    picked: set[int] = set()
    while len(picked) < m:
        draws = rng.integers(0, total, size=m - len(picked))
        picked.update(int(x) for x in draws)
    return sorted(picked)


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------

def sample_csp(n: int, p: float, dist: ConstraintDistribution, seed: int) -> CspInstance:
    """Sample from the simple model: one constraint per selected k-subset.

    Each of the C(n, k) unordered k-subsets of variables independently
    receives a constraint with probability p; selected subsets get a
    uniformly random variable order and a template drawn from the
    distribution.  No two constraints share the same unordered variable set.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    k = dist.arity
    if n < k:
        raise ValueError(f"need n >= k = {k}, got n = {n}")
    rng = make_rng(seed)
    total = math.comb(n, k)
    m = int(rng.binomial(total, p)) if p > 0 else 0
    ranks = _sample_distinct(rng, total, m)
    tids = rng.choice(len(dist.templates), size=m, p=dist.float_probabilities())
    constraints = []
    for rank, tid in zip(ranks, tids):
        subset = _unrank_combination(rank, n, k)
        order = rng.permutation(k)
        constraints.append((tuple(subset[j] for j in order), int(tid)))
    return CspInstance(n, dist.domain_size, k, dist.templates, tuple(constraints))


def sample_hat_csp(n: int, p: float, dist: ConstraintDistribution, seed: int) -> CspInstance:
    """Sample from the hat model: per (ordered tuple, template) coin flips.

    Every (ordered k-tuple, support template) pair is independently present
    with probability P(template) * p / k!, so one tuple may carry several
    constraints (at most one per template).  The expected total number of
    constraints matches the simple model at the same p.
    """
    k = dist.arity
    if n < k:
        raise ValueError(f"need n >= k = {k}, got n = {n}")
    kfact = math.factorial(k)
    for tpl, prob in zip(dist.templates, dist.probabilities):
        q = float(prob) * p / kfact
        if not 0.0 <= q <= 1.0:
            raise ValueError(
                f"per-tuple probability {q} outside [0, 1] for template with "
                f"{tpl.num_restrictions} restrictions"
            )
    rng = make_rng(seed)
    total = math.perm(n, k)
    constraints = []
    for tid, prob in enumerate(dist.probabilities):
        q = float(prob) * p / kfact
        m = int(rng.binomial(total, q)) if q > 0 else 0
        for rank in _sample_distinct(rng, total, m):
            constraints.append((_unrank_arrangement(rank, n, k), tid))
    return CspInstance(n, dist.domain_size, k, dist.templates, tuple(constraints))


# ---------------------------------------------------------------------------
# planting and one-variable constraints
# ---------------------------------------------------------------------------

def plant(instance: CspInstance, m_csp: CspInstance, seed: int) -> CspInstance:
    """Add a copy of m_csp on a uniformly random ordered tuple of variables.

    The i-th variable of m_csp is identified with the i-th entry of a random
    r-tuple of distinct instance variables; constraints are copied preserving
    their internal variable order, and restricted domains of m_csp carry over
    by intersection.
    """
    r = m_csp.n
    if r > instance.n:
        raise ValueError(f"cannot plant {r} variables into an instance with {instance.n}")
    if (m_csp.domain_size, m_csp.arity) != (instance.domain_size, instance.arity):
        raise ValueError("planted CSP must share (d, k) with the instance")
    rng = make_rng(seed)
    targets = [int(v) + 1 for v in rng.permutation(instance.n)[:r]]

    templates = list(instance.templates)
    index = {t: i for i, t in enumerate(templates)}
    remap = []
    for t in m_csp.templates:
        if t not in index:
            index[t] = len(templates)
            templates.append(t)
        remap.append(index[t])

    constraints = list(instance.constraints)
    for vs, tid in m_csp.constraints:
        constraints.append((tuple(targets[v - 1] for v in vs), remap[tid]))

    domains = list(instance.domains)
    for i, target in enumerate(targets):
        domains[target - 1] = domains[target - 1] & m_csp.domains[i]

    return CspInstance(instance.n, instance.domain_size, instance.arity,
                       tuple(templates), tuple(constraints), tuple(domains))


def force_values(instance: CspInstance, pairs: Iterable[tuple[int, int]]) -> CspInstance:
    """Restrict each listed variable's domain to a single value.

    Forcing a value outside the current domain empties it, which marks the
    instance trivially unsatisfiable; forcing one variable to two different
    values (in one call or across calls) does the same.
    """
    domains = list(instance.domains)
    for v, val in pairs:
        if not 1 <= v <= instance.n:
            raise ValueError(f"variable {v} outside 1..{instance.n}")
        if not 1 <= val <= instance.domain_size:
            raise ValueError(f"value {val} outside 1..{instance.domain_size}")
        domains[v - 1] = domains[v - 1] & {val}
    return CspInstance(instance.n, instance.domain_size, instance.arity,
                       instance.templates, instance.constraints, tuple(domains))


def forbid_values(instance: CspInstance, pairs: Iterable[tuple[int, int]]) -> CspInstance:
    """Remove one value from each listed variable's domain."""
    domains = list(instance.domains)
    for v, val in pairs:
        if not 1 <= v <= instance.n:
            raise ValueError(f"variable {v} outside 1..{instance.n}")
        if not 1 <= val <= instance.domain_size:
            raise ValueError(f"value {val} outside 1..{instance.domain_size}")
        domains[v - 1] = domains[v - 1] - {val}
    return CspInstance(instance.n, instance.domain_size, instance.arity,
                       instance.templates, instance.constraints, tuple(domains))


# ---------------------------------------------------------------------------
# random digraphs (2-cycle diagnostics)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Digraph:
    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        es = tuple((int(a), int(b)) for a, b in self.edges)
        for a, b in es:
            if not (1 <= a <= self.n and 1 <= b <= self.n) or a == b:
                raise ValueError(f"bad directed edge ({a}, {b})")
        if len(set(es)) != len(es):
            raise ValueError("duplicate directed edge")
        object.__setattr__(self, "edges", tuple(sorted(es)))


def sample_digraph(n: int, p: float, seed: int) -> Digraph:
    """Each of the n(n-1) potential directed edges is present with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    rng = make_rng(seed)
    total = n * (n - 1)
    m = int(rng.binomial(total, p)) if p > 0 and total else 0
    edges = [_unrank_arrangement(rank, n, 2) for rank in _sample_distinct(rng, total, m)]
    return Digraph(n, tuple(edges))


def count_two_cycles(dg: Digraph) -> int:
    """Number of unordered pairs {u, v} with both uv and vu present."""
    es = set(dg.edges)
    return sum(1 for a, b in es if a < b and (b, a) in es)


def underlying_edges(dg: Digraph) -> tuple[tuple[int, int], ...]:
    """Undirected edge set: directions dropped, double edges collapsed."""
    return tuple(sorted({(min(a, b), max(a, b)) for a, b in dg.edges}))


# ---------------------------------------------------------------------------
# random unicyclic instances (test structures for the property suites)
# ---------------------------------------------------------------------------

def sample_unicyclic_csp(dist: ConstraintDistribution, seed: int,
                         cycle_len: int | None = None,
                         tree_edges: int | None = None) -> CspInstance:
    """A random connected CSP whose constraint hypergraph has exactly one cycle.

    The structure is a cycle of `cycle_len` hyperedges with `tree_edges`
    additional hyperedges attached at random vertices; each hyperedge gets a
    template drawn from the distribution, a random internal order and random
    dense variable labels.
    """
    from .hypergraph import random_unicyclic_hypergraph

    k = dist.arity
    rng = make_rng(seed)
    if cycle_len is None:
        low = 3 if k == 2 else 2
        cycle_len = int(rng.integers(low, 7))
    if tree_edges is None:
        tree_edges = int(rng.integers(0, 6))
    h = random_unicyclic_hypergraph(k, cycle_len, tree_edges,
                                    derive_seed(seed, "structure"))
    tids = rng.choice(len(dist.templates), size=len(h.edges),
                      p=dist.float_probabilities())
    constraints = tuple((vs, int(t)) for vs, t in zip(h.edges, tids))
    return CspInstance(h.n, dist.domain_size, k, dist.templates, constraints)
