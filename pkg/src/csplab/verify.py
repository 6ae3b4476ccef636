"""Named verification bundles shared by the CLI `verify` command and the
acceptance test suite.

Each check returns a list of (name, passed, detail) triples so callers can
print one line per criterion.  Scale parameters default to the full
acceptance sizes; the CLI can run reduced versions.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .criticality import (SUBCRITICAL, SUPERCRITICAL, classify,
                          coarse_witness_value, critical_constants,
                          forcing_weight)
from .distributions import dkt_distribution, example_ed3
from .homomorphism import (complete_graph_target, cycle_graph_target,
                           has_homomorphism, single_edge_target,
                           unicyclic_to_edge, verify_homomorphism)
from .hypergraph import (Hypergraph, random_unicyclic_graph,
                         random_unicyclic_hypergraph)
from .model import (CspInstance, evaluate, force_values, sample_csp,
                    sample_hat_csp, sample_unicyclic_csp)
from .rng import derive_seed, make_rng
from .solver import brute_force, solve

Check = tuple[str, bool, str]


def ed3_triangle_of_not_equal() -> CspInstance:
    """Three variables in a triangle of difference constraints (domain 3)."""
    nd = example_ed3()
    return CspInstance(3, 3, 2, nd.dist.templates,
                       (((1, 2), 1), ((2, 3), 1), ((3, 1), 1)))


# ---------------------------------------------------------------------------
# bundles
# ---------------------------------------------------------------------------

def check_unicyclic_dkt(instances_per_family: int = 500, seed: int = 902,
                        families=((2, 2, 1), (2, 3, 1), (3, 2, 2), (2, 3, 3))
                        ) -> list[Check]:
    """Random unicyclic instances from sparse (d, k, t) families are satisfiable."""
    out = []
    for d, k, t in families:
        nd = dkt_distribution(d, k, t)
        bad = 0
        for i in range(instances_per_family):
            inst = sample_unicyclic_csp(nd.dist, derive_seed(seed, d, k, t, i))
            result = solve(inst)
            if result is None or not evaluate(inst, result):
                bad += 1
        out.append((f"unicyclic dkt({d},{k},{t}) x{instances_per_family} satisfiable",
                    bad == 0, f"{bad} failures"))
    return out


def check_hom_lemmas(samples: int = 200, seed: int = 903) -> list[Check]:
    """Constructive mappings on unicyclic inputs, plus the K3 -> C5 refusal."""
    out = []
    rng = make_rng(seed)
    failures = 0
    for i in range(samples):
        cycle_len = int(rng.integers(2, 7))
        tree_edges = int(rng.integers(0, 7))
        g = random_unicyclic_hypergraph(3, cycle_len, tree_edges,
                                        derive_seed(seed, "u3", i))
        mapping = unicyclic_to_edge(g)
        if not verify_homomorphism(g, single_edge_target(3), mapping):
            failures += 1
    out.append((f"unicyclic 3-uniform -> single edge x{samples}", failures == 0,
                f"{failures} failures"))

    k3 = complete_graph_target(3)
    failures = 0
    for i in range(samples):
        cycle_len = int(rng.integers(3, 9))
        tree_edges = int(rng.integers(0, 7))
        g = random_unicyclic_graph(cycle_len, tree_edges, derive_seed(seed, "u2", i))
        if has_homomorphism(g, k3) is None:
            failures += 1
    out.append((f"unicyclic graphs -> K3 x{samples}", failures == 0,
                f"{failures} failures"))

    tri_graph = Hypergraph(3, ((1, 2), (2, 3), (3, 1)))
    rejected = has_homomorphism(tri_graph, cycle_graph_target(5)) is None
    accepted = has_homomorphism(tri_graph, k3) is not None
    out.append(("K3 -> C5 rejected, K3 -> K3 accepted", rejected and accepted, ""))
    return out


def check_ed3_criticality() -> list[Check]:
    """Exact forcing weights, critical constants and the witness value."""
    nd = example_ed3()
    out = []
    w11 = forcing_weight(nd.dist, 1, 1)
    others_zero = all(forcing_weight(nd.dist, a, b) == 0
                      for a in (1, 2, 3) for b in (1, 2, 3) if (a, b) != (1, 1))
    out.append(("W[1][1] = 2/3 and all other entries 0",
                w11 == Fraction(2, 3) and others_zero, f"W[1][1] = {w11}"))
    consts = critical_constants(nd.dist)
    out.append(("critical constants = {1.5}",
                len(consts) == 1 and abs(consts[0] - 1.5) <= 1e-9, f"{consts}"))
    report = classify(nd.dist, 2.0)
    sup_ok = report.pair(1, 1) == SUPERCRITICAL
    rest_ok = all(report.pair(a, b) == SUBCRITICAL
                  for a in (2, 3) for b in (1, 2, 3))
    out.append(("classify at c=2: (1,1) supercritical, rows 2,3 subcritical",
                sup_ok and rest_ok, ""))
    triangle = ed3_triangle_of_not_equal()
    w2 = coarse_witness_value(nd.dist, 2.0, triangle)
    w1 = coarse_witness_value(nd.dist, 1.0, triangle)
    out.append(("witness value 1 at c=2, none at c=1", w2 == 1 and w1 is None,
                f"got {w2} and {w1}"))
    return out


def check_model_relation(seeds: int = 2000, n: int = 200, c: float = 2.0,
                         seed: int = 905) -> list[Check]:
    """Mean constraint counts of the two samplers agree (3 combined SEs)."""
    nd = example_ed3()
    p = c / n
    simple = []
    hat = []
    for i in range(seeds):
        simple.append(len(sample_csp(n, p, nd.dist, derive_seed(seed, "s", i)).constraints))
        hat.append(len(sample_hat_csp(n, p, nd.dist, derive_seed(seed, "h", i)).constraints))
    ms = sum(simple) / seeds
    mh = sum(hat) / seeds
    vs = sum((x - ms) ** 2 for x in simple) / (seeds - 1)
    vh = sum((x - mh) ** 2 for x in hat) / (seeds - 1)
    se = math.sqrt(vs / seeds + vh / seeds)
    ok = abs(ms - mh) <= 3 * se
    return [(f"simple vs hat mean constraint count (n={n}, c={c}, {seeds} seeds)",
             ok, f"|{ms:.2f} - {mh:.2f}| vs 3se = {3 * se:.2f}")]


def check_formats(samples: int = 500, seed: int = 906) -> list[Check]:
    """parse(emit(instance)) identity on random instances, hat and forced included."""
    from .iofmt import emit_instance, parse_instance
    from .model import forbid_values, force_values

    rng = make_rng(seed)
    failures = 0
    for i in range(samples):
        d = int(rng.integers(2, 4))
        k = int(rng.integers(2, 4))
        t = int(rng.integers(1, min(d ** k, 5) + 1))
        nd = dkt_distribution(d, k, t)
        n = int(rng.integers(k, 14))
        c = float(rng.uniform(0.0, 3.0))
        p = min(c / n ** (k - 1), 1.0)
        s = derive_seed(seed, "rt", i)
        if i % 2:
            inst = sample_hat_csp(n, p, nd.dist, s)
        else:
            inst = sample_csp(n, p, nd.dist, s)
        if i % 3 == 0 and n >= 2:
            inst = force_values(inst, [(1, int(rng.integers(1, d + 1)))])
            inst = forbid_values(inst, [(2, int(rng.integers(1, d + 1)))])
        if parse_instance(emit_instance(inst)) != inst:
            failures += 1
    return [(f"format round-trip x{samples}", failures == 0, f"{failures} failures")]


def check_oracle_agreement(samples: int = 1000, seed: int = 907) -> list[Check]:
    """solve and brute_force agree on small random instances."""
    from .distributions import homomorphism_distribution

    rng = make_rng(seed)
    pool = [dkt_distribution(2, 2, 1), dkt_distribution(2, 2, 2),
            dkt_distribution(3, 2, 2), dkt_distribution(2, 3, 1),
            dkt_distribution(2, 3, 3), dkt_distribution(3, 3, 4),
            example_ed3(),
            homomorphism_distribution(complete_graph_target(3))]
    disagreements = 0
    invalid = 0
    for i in range(samples):
        nd = pool[int(rng.integers(0, len(pool)))]
        k = nd.arity
        n = int(rng.integers(k, 13))
        c = float(rng.uniform(0.0, 4.0))
        p = min(c / n ** (k - 1), 1.0)
        s = derive_seed(seed, "oracle", i)
        inst = (sample_hat_csp if i % 4 == 0 else sample_csp)(n, p, nd.dist, s)
        if i % 5 == 0:
            inst = force_values(inst, [(1, int(rng.integers(1, nd.domain_size + 1)))])
        got = solve(inst)
        want = brute_force(inst)
        if (got is None) != (want is None):
            disagreements += 1
        elif got is not None and not evaluate(inst, got):
            invalid += 1
    ok = disagreements == 0 and invalid == 0
    return [(f"solve vs brute force x{samples}", ok,
             f"{disagreements} disagreements, {invalid} invalid witnesses")]


BUNDLES = {
    "unicyclic-dkt": lambda: check_unicyclic_dkt(),
    "hom-lemmas": lambda: check_hom_lemmas(),
    "ed3-criticality": lambda: check_ed3_criticality(),
    "model-relation": lambda: check_model_relation(),
    "formats": lambda: check_formats(),
    "oracle-small": lambda: check_oracle_agreement(250),
}
