"""Builders for the named constraint distributions and a small spec language.

Every builder returns a NamedDistribution whose tag regenerates the identical
distribution through distribution_from_spec, so experiment outputs stay
self-describing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from pathlib import Path

from .homomorphism import TargetHypergraph, complete_graph_target
from .model import ConstraintDistribution, ConstraintTemplate

ENUMERATION_LIMIT = 10**6


@dataclass(frozen=True)
class NamedDistribution:
    """A distribution plus the provenance tag that rebuilds it."""

    tag: str
    dist: ConstraintDistribution
    nontrivial: bool | None = None  # set by the (d, k, t) builder

    @property
    def domain_size(self) -> int:
        return self.dist.domain_size

    @property
    def arity(self) -> int:
        return self.dist.arity


def _all_value_tuples(d: int, k: int) -> list[tuple[int, ...]]:
    return list(product(range(1, d + 1), repeat=k))


def dkt_distribution(d: int, k: int, t: int) -> NamedDistribution:
    """Uniform distribution over every template with exactly t restrictions.

    Templates are enumerated in lexicographic restriction order with exact
    probabilities 1 / C(d^k, t).  The `nontrivial` flag records whether
    t < d^(k-1), the regime in which sparse instances are not trivially
    overconstrained.
    """
    if d < 2 or k < 2:
        raise ValueError(f"need d, k >= 2, got d={d} k={k}")
    if not 1 <= t <= d**k:
        raise ValueError(f"need 1 <= t <= d^k = {d ** k}, got t={t}")
    count = math.comb(d**k, t)
    if count > ENUMERATION_LIMIT:
        raise ValueError(f"{count} templates exceed the enumeration limit "
                         f"{ENUMERATION_LIMIT}")
    tuples = _all_value_tuples(d, k)
    prob = Fraction(1, count)
    templates = tuple(ConstraintTemplate(d, k, frozenset(rows))
                      for rows in combinations(tuples, t))
    dist = ConstraintDistribution(templates, (prob,) * count)
    return NamedDistribution(f"dkt:{d},{k},{t}", dist, nontrivial=t < d ** (k - 1))


def _equal_or_neither_template() -> ConstraintTemplate:
    # forbidden: exactly one endpoint carries the value 1
    rows = {(1, x) for x in (2, 3)} | {(x, 1) for x in (2, 3)}
    return ConstraintTemplate(3, 2, frozenset(rows))


def _not_equal_template(d: int) -> ConstraintTemplate:
    return ConstraintTemplate(d, 2, frozenset((v, v) for v in range(1, d + 1)))


def example_ed3() -> NamedDistribution:
    """The two-template domain-3 family with a coarse threshold.

    Template A (probability 2/3) demands that either both endpoints carry
    the value 1 or neither does; template B (probability 1/3) demands the
    endpoints differ.
    """
    dist = ConstraintDistribution(
        (_equal_or_neither_template(), _not_equal_template(3)),
        (Fraction(2, 3), Fraction(1, 3)),
    )
    return NamedDistribution("ed3", dist)


def _mixed_tuples(d_low: int, extra: int, k: int) -> set[tuple[int, ...]]:
    """Tuples mixing low values 1..d_low with high values d_low+1..d_low+extra."""
    out = set()
    for tup in product(range(1, d_low + extra + 1), repeat=k):
        has_low = any(v <= d_low for v in tup)
        has_high = any(v > d_low for v in tup)
        if has_low and has_high:
            out.add(tup)
    return out


def section3_family(q: float | Fraction) -> tuple[NamedDistribution, float]:
    """The domain-5 two-template family tying sharpness to 3-colourability.

    Both templates force an edge's endpoints either both into {1,2,3} or
    both into {4,5}; the first (probability q) additionally forbids equal
    values inside {4,5}, the second (probability 1-q) forbids equal values
    inside {1,2,3}.  Returns the family and the companion density
    c(q) = (1-q)/q.
    """
    qf = q if isinstance(q, Fraction) else Fraction(float(q))
    if not 0 < qf < 1:
        raise ValueError(f"q must be in (0, 1), got {q}")
    mixed = _mixed_tuples(3, 2, 2)
    c1 = ConstraintTemplate(5, 2, frozenset({(4, 4), (5, 5)} | mixed))
    c2 = ConstraintTemplate(5, 2, frozenset({(1, 1), (2, 2), (3, 3)} | mixed))
    dist = ConstraintDistribution((c1, c2), (qf, 1 - qf))
    c_of_q = float((1 - qf) / qf)
    return NamedDistribution(f"section3:{float(qf)!r}", dist), c_of_q


def prime_family(base: NamedDistribution | ConstraintDistribution,
                 q: float | Fraction, *, base_tag: str | None = None
                 ) -> NamedDistribution:
    """Lift a base distribution to domain d+2 with a sharpness-coupling gadget.

    Every lifted template keeps its base restrictions and additionally forces
    all k variables into {1..d} or all into {d+1, d+2}; the extra template
    (probability q) also forbids the first two variables from both being d+1
    or both being d+2.  Base templates keep probability (1-q) * P(base).
    """
    if isinstance(base, NamedDistribution):
        base_tag = base_tag or base.tag
        base = base.dist
    qf = q if isinstance(q, Fraction) else Fraction(float(q))
    if not 0 < qf < 1:
        raise ValueError(f"q must be in (0, 1), got {q}")
    d, k = base.domain_size, base.arity
    mixed = _mixed_tuples(d, 2, k)
    lifted = []
    for tpl in base.templates:
        lifted.append(ConstraintTemplate(d + 2, k, frozenset(tpl.restrictions) | mixed))
    star_rows = set(mixed)
    for tup in product((d + 1, d + 2), repeat=k):
        if tup[0] == tup[1]:
            star_rows.add(tup)
    star = ConstraintTemplate(d + 2, k, frozenset(star_rows))
    templates = tuple(lifted) + (star,)
    probs = tuple((1 - qf) * p for p in base.probabilities) + (qf,)
    tag = f"prime:{float(qf)!r}" + (f";{base_tag}" if base_tag else "")
    return NamedDistribution(tag, ConstraintDistribution(templates, probs))


def homomorphism_distribution(target: TargetHypergraph, *,
                              tag: str | None = None) -> NamedDistribution:
    """Single-template distribution whose constraints permit exactly the
    hyperedges of the target."""
    d, k = target.n, target.arity
    rows = frozenset(t for t in _all_value_tuples(d, k) if t not in target.edge_lookup)
    dist = ConstraintDistribution((ConstraintTemplate(d, k, rows),), (Fraction(1),))
    return NamedDistribution(tag or f"hom:{d}v{k}u{len(target.edges)}e", dist)


# ---------------------------------------------------------------------------
# spec mini-language: name[:params]
# ---------------------------------------------------------------------------

def distribution_from_spec(spec: str, *, target: TargetHypergraph | None = None,
                           base: str | None = None) -> NamedDistribution:
    """Build a distribution from a compact spec string.

    Supported forms:
      dkt:<d>,<k>,<t>       uniform over templates with t restrictions
      ed3                   the coarse-threshold domain-3 example
      section3:<q>          the 3-colourability-coupled domain-5 family
      prime:<q>             lift of `base` (another spec string)
      hom                   homomorphism family for `target`
      hom-k<c>              homomorphism family for the complete graph K_c
      file:<path>           distribution file in the text format
    """
    name, _, params = spec.partition(":")
    if name == "dkt":
        try:
            d, k, t = (int(x) for x in params.split(","))
        except ValueError:
            raise ValueError(f"bad dkt spec {spec!r}; expected dkt:d,k,t") from None
        return dkt_distribution(d, k, t)
    if name == "ed3":
        return example_ed3()
    if name == "section3":
        return section3_family(float(params))[0]
    if name == "prime":
        if base is None:
            raise ValueError("prime:<q> needs a base distribution spec")
        return prime_family(distribution_from_spec(base), float(params))
    if name == "hom":
        if target is None:
            raise ValueError("hom needs a target hypergraph")
        return homomorphism_distribution(target)
    if name.startswith("hom-k") and not params:
        return homomorphism_distribution(complete_graph_target(int(name[5:])),
                                         tag=name)
    if name == "file":
        from .iofmt import parse_distribution

        path = Path(params)
        if not path.exists():
            raise ValueError(f"distribution file {path} does not exist")
        return NamedDistribution(spec, parse_distribution(path.read_text()))
    raise ValueError(f"unknown distribution spec {spec!r}")
