"""Analytic sub/supercriticality of forcing chains, with Monte-Carlo checks.

For a binary distribution, W[delta][gamma] is the expected per-unit-density
number of one-step forcings delta -> gamma seen from one endpoint of a random
constraint: each support template contributes its probability, split evenly
over the two orientations, whenever exactly one compatible partner value
remains and it equals gamma.  At edge density p = c/n the branching process
that exposes a forcing closure has mean matrix c*W, so a strongly connected
set of values percolates iff c times its spectral radius exceeds one.

Entries of W are exact rationals; spectral radii are computed by power
iteration on the (irreducible) strongly connected blocks.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .hypergraph import constraint_hypergraph, is_unicyclic
from .model import ConstraintDistribution, CspInstance, sample_csp
from .rng import derive_seed, make_rng
from .solver import _forced_value, implication_closure, solve_excluding_value

CRITICAL_TOL = 1e-9

SUBCRITICAL = "subcritical"
SUPERCRITICAL = "supercritical"
CRITICAL = "critical"


# ---------------------------------------------------------------------------
# mean forcing matrix
# ---------------------------------------------------------------------------

def forcing_weight(dist: ConstraintDistribution, delta: int, gamma: int) -> Fraction:
    """Expected one-step forcing weight delta -> gamma (exact rational)."""
    if dist.arity != 2:
        raise ValueError("forcing weights are defined for k = 2 only")
    d = dist.domain_size
    if not (1 <= delta <= d and 1 <= gamma <= d):
        raise ValueError(f"values ({delta}, {gamma}) outside 1..{d}")
    half = Fraction(1, 2)
    w = Fraction(0)
    for tpl, prob in zip(dist.templates, dist.probabilities):
        for slot in (0, 1):
            if _forced_value(tpl, slot, delta) == gamma:
                w += prob * half
    return w


@dataclass(frozen=True)
class MeanMatrix:
    """d x d matrix of expected one-step forcing weights."""

    entries: tuple[tuple[Fraction, ...], ...]

    @property
    def d(self) -> int:
        return len(self.entries)

    def as_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.entries])

    def scaled(self, c: float) -> np.ndarray:
        return c * self.as_float()


def mean_matrix(dist: ConstraintDistribution) -> MeanMatrix:
    d = dist.domain_size
    rows = tuple(tuple(forcing_weight(dist, a, b) for b in range(1, d + 1))
                 for a in range(1, d + 1))
    return MeanMatrix(rows)


# ---------------------------------------------------------------------------
# spectral radius and value-graph structure
# ---------------------------------------------------------------------------

def spectral_radius(matrix: np.ndarray, *, iterations: int = 200,
                    tol: float = 1e-12) -> float:
    """Power iteration on A + I (primitive for irreducible nonnegative A),
    so periodic blocks converge too; returns rho(A)."""
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    m = a.shape[0]
    if m == 1:
        return float(a[0, 0])
    shifted = a + np.eye(m)
    x = np.ones(m) / math.sqrt(m)
    rho = 0.0
    for _ in range(iterations):
        y = shifted @ x
        nrm = float(np.linalg.norm(y))
        if nrm == 0.0:
            return 0.0
        new = nrm
        x = y / nrm
        if abs(new - rho) < tol:
            rho = new
            break
        rho = new
    return max(rho - 1.0, 0.0)


def _sccs(adjacency: list[list[int]]) -> list[list[int]]:
    """Strongly connected components (Tarjan, iterative); nodes are 0-based."""
    n = len(adjacency)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for i in range(pi, len(adjacency[v])):
                w = adjacency[v][i]
                if index[w] == -1:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                out.append(sorted(comp))
            if work:
                u, _ = work[-1]
                low[u] = min(low[u], low[v])
    return out


def _value_graph(w: np.ndarray) -> list[list[int]]:
    d = w.shape[0]
    return [[b for b in range(d) if w[a, b] > 0] for a in range(d)]


def _reachable(adjacency: list[list[int]], start: int) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adjacency[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def critical_constants(dist: ConstraintDistribution) -> list[float]:
    """Densities where some strongly connected value set reaches mean one:
    1/rho for each component with positive spectral radius, deduplicated."""
    w = mean_matrix(dist).as_float()
    adjacency = _value_graph(w)
    constants: list[float] = []
    for comp in _sccs(adjacency):
        sub = w[np.ix_(comp, comp)]
        rho = spectral_radius(sub)
        if rho > 0:
            c = 1.0 / rho
            if not any(abs(c - x) <= CRITICAL_TOL for x in constants):
                constants.append(c)
    return sorted(constants)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CriticalityReport:
    c: float
    d: int
    pair_labels: dict[tuple[int, int], str]
    f_labels: dict[int, str]
    critical_constants: tuple[float, ...]

    def pair(self, delta: int, gamma: int) -> str:
        return self.pair_labels[(delta, gamma)]

    def f_delta(self, delta: int) -> str:
        return self.f_labels[delta]

    def to_jsonable(self) -> dict:
        return {
            "c": self.c,
            "d": self.d,
            "pairs": [{"delta": a, "gamma": b, "label": lab}
                      for (a, b), lab in sorted(self.pair_labels.items())],
            "f_delta": [{"delta": a, "label": lab}
                        for a, lab in sorted(self.f_labels.items())],
            "critical_constants": list(self.critical_constants),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_jsonable(), indent=2)


def classify(dist: ConstraintDistribution, c: float) -> CriticalityReport:
    """Label every forcing pair and every source value at density c.

    A pair (delta, gamma) is supercritical iff some strongly connected value
    set with c * rho > 1 is reachable from delta and reaches gamma; it is
    critical when the best such route only attains c * rho = 1 (within
    tolerance); otherwise subcritical.  F_delta takes the strongest label
    among its pairs.
    """
    if dist.arity != 2:
        raise ValueError("criticality classification is defined for k = 2 only")
    if c < 0:
        raise ValueError(f"density must be nonnegative, got {c}")
    d = dist.domain_size
    w = mean_matrix(dist).as_float()
    adjacency = _value_graph(w)
    sccs = _sccs(adjacency)
    radii = [spectral_radius(w[np.ix_(comp, comp)]) for comp in sccs]
    reach_from = [_reachable(adjacency, v) for v in range(d)]
    reverse = [[a for a in range(d) if v in adjacency[a]] for v in range(d)]
    reach_to = [_reachable(reverse, v) for v in range(d)]

    pair_labels: dict[tuple[int, int], str] = {}
    for a in range(d):
        for b in range(d):
            label = SUBCRITICAL
            for comp, rho in zip(sccs, radii):
                if rho <= 0:
                    continue
                on_route = (set(comp) & reach_from[a]) and (set(comp) & reach_to[b])
                if not on_route:
                    continue
                scaled = c * rho
                if abs(scaled - 1.0) <= CRITICAL_TOL:
                    if label != SUPERCRITICAL:
                        label = CRITICAL
                elif scaled > 1.0:
                    label = SUPERCRITICAL
                    break
            pair_labels[(a + 1, b + 1)] = label
    f_labels: dict[int, str] = {}
    for a in range(1, d + 1):
        labels = {pair_labels[(a, b)] for b in range(1, d + 1)}
        if SUPERCRITICAL in labels:
            f_labels[a] = SUPERCRITICAL
        elif CRITICAL in labels:
            f_labels[a] = CRITICAL
        else:
            f_labels[a] = SUBCRITICAL
    return CriticalityReport(c, d, pair_labels, f_labels,
                             tuple(critical_constants(dist)))


# ---------------------------------------------------------------------------
# Monte-Carlo growth check
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GrowthRow:
    n: int
    trials: int
    mean: float
    stderr: float


def monte_carlo_growth(dist: ConstraintDistribution, c: float, delta: int,
                       gamma: int, n_list: list[int], trials: int, seed: int
                       ) -> list[GrowthRow]:
    """Empirical mean closure sizes |F_{delta,gamma}(v)| across instance sizes.

    Flat means indicate a subcritical pair, linear growth a supercritical
    one.  Each trial samples a simple-model instance at p = c/n, picks a
    uniform source variable and measures the closure.
    """
    if dist.arity != 2:
        raise ValueError("growth curves are defined for k = 2 only")
    rows = []
    for n in n_list:
        p = c / n
        sizes = np.empty(trials)
        for t in range(trials):
            s = derive_seed(seed, "growth", n, t)
            instance = sample_csp(n, p, dist, s)
            v = 1 + int(make_rng(derive_seed(s, "source")).integers(0, n))
            closure = implication_closure(instance, v, delta)
            sizes[t] = len(closure.members(gamma))
        mean = float(sizes.mean())
        stderr = float(sizes.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
        rows.append(GrowthRow(n, trials, mean, stderr))
    return rows


def coarse_witness_value(dist: ConstraintDistribution, c: float,
                         m_csp: CspInstance) -> int | None:
    """The smallest value delta such that m_csp cannot be satisfied without
    delta and the diagonal pair (delta, delta) is supercritical at c.

    Defined for binary distributions with domain size 3 and unicyclic m_csp.
    """
    if dist.arity != 2 or dist.domain_size != 3:
        raise ValueError("witness search is defined for d = 3, k = 2 only")
    if (m_csp.arity, m_csp.domain_size) != (2, 3):
        raise ValueError("m_csp must share (d, k) = (3, 2)")
    if not is_unicyclic(constraint_hypergraph(m_csp)):
        raise ValueError("m_csp must be unicyclic")
    report = classify(dist, c)
    for delta in (1, 2, 3):
        if report.pair(delta, delta) != SUPERCRITICAL:
            continue
        if solve_excluding_value(m_csp, delta) is None:
            return delta
    return None
