"""Named distribution builders and the spec mini-language."""

import math
from fractions import Fraction
from itertools import product

import pytest

from csplab import (ConstraintTemplate, CspInstance, brute_force,
                    complete_graph_target, distribution_from_spec, evaluate,
                    sample_csp, solve, template_satisfied)
from csplab.distributions import (dkt_distribution, example_ed3,
                                  homomorphism_distribution, prime_family,
                                  section3_family)
from csplab.homomorphism import TargetHypergraph


class TestDkt:
    def test_2_2_1_is_random_2sat(self):
        nd = dkt_distribution(2, 2, 1)
        assert len(nd.dist.templates) == 4
        assert all(p == Fraction(1, 4) for p in nd.dist.probabilities)
        assert all(t.num_restrictions == 1 for t in nd.dist.templates)
        assert nd.nontrivial  # 1 < 2^1

    def test_2_3_1_has_eight_templates(self):
        nd = dkt_distribution(2, 3, 1)
        assert len(nd.dist.templates) == 8

    def test_2_2_2_is_trivial_regime(self):
        nd = dkt_distribution(2, 2, 2)
        assert len(nd.dist.templates) == math.comb(4, 2)
        assert nd.nontrivial is False  # t = d^(k-1)

    @pytest.mark.parametrize("d,k", [(2, 2), (2, 3), (3, 2), (3, 3)])
    def test_support_size_matches_combinatorics(self, d, k):
        for t in range(1, min(d**k, 5) + 1):
            nd = dkt_distribution(d, k, t)
            assert len(nd.dist.templates) == math.comb(d**k, t)

    def test_templates_enumerated_in_lexicographic_order(self):
        nd = dkt_distribution(2, 2, 1)
        rows = [sorted(t.restrictions)[0] for t in nd.dist.templates]
        assert rows == sorted(rows)

    def test_enumeration_limit(self):
        with pytest.raises(ValueError):
            dkt_distribution(3, 3, 14)  # C(27, 14) is far above the cap

    def test_t_out_of_range(self):
        with pytest.raises(ValueError):
            dkt_distribution(2, 2, 5)
        with pytest.raises(ValueError):
            dkt_distribution(2, 2, 0)


class TestExampleEd3:
    def test_template_semantics(self):
        nd = example_ed3()
        both_or_neither, differ = nd.dist.templates
        assert template_satisfied(both_or_neither, (1, 1))
        assert not template_satisfied(both_or_neither, (1, 2))
        assert not template_satisfied(both_or_neither, (3, 1))
        assert template_satisfied(both_or_neither, (2, 3))
        assert template_satisfied(differ, (2, 3))
        assert not template_satisfied(differ, (2, 2))

    def test_probabilities(self):
        nd = example_ed3()
        assert nd.dist.probabilities == (Fraction(2, 3), Fraction(1, 3))

    def test_every_small_unicyclic_instance_is_satisfiable(self):
        # exhaustive over all cycles up to 7 variables and all template
        # labelings (both templates are symmetric, so orientation is moot);
        # tree attachments cannot break satisfiability because every value
        # has a compatible partner value under both templates
        nd = example_ed3()
        for r in range(3, 8):
            for labels in product((0, 1), repeat=r):
                cons = tuple(((i + 1, (i + 1) % r + 1), labels[i]) for i in range(r))
                inst = CspInstance(r, 3, 2, nd.dist.templates, cons)
                assert brute_force(inst) is not None

    def test_random_unicyclic_instances_with_trees_are_satisfiable(self):
        from csplab import sample_unicyclic_csp
        nd = example_ed3()
        for seed in range(300):
            inst = sample_unicyclic_csp(nd.dist, seed)
            if inst.n <= 7:
                assert brute_force(inst) is not None
            else:
                assert solve(inst) is not None


class TestSection3:
    def test_c_of_q(self):
        _, c = section3_family(0.5)
        assert c == pytest.approx(1.0)
        _, c = section3_family(0.2)
        assert c == pytest.approx(4.0)

    def test_mixed_pairs_violate_both_templates(self):
        nd, _ = section3_family(0.3)
        for tpl in nd.dist.templates:
            for low in (1, 2, 3):
                for high in (4, 5):
                    assert not template_satisfied(tpl, (low, high))
                    assert not template_satisfied(tpl, (high, low))

    def test_first_template_forbids_equal_high_values(self):
        nd, _ = section3_family(0.3)
        c1 = nd.dist.templates[0]
        assert not template_satisfied(c1, (4, 4))
        assert not template_satisfied(c1, (5, 5))
        assert template_satisfied(c1, (4, 5))
        assert template_satisfied(c1, (1, 1))

    def test_second_template_forbids_equal_low_values(self):
        nd, _ = section3_family(0.3)
        c2 = nd.dist.templates[1]
        for v in (1, 2, 3):
            assert not template_satisfied(c2, (v, v))
        assert template_satisfied(c2, (1, 2))
        assert template_satisfied(c2, (4, 4))

    def test_probabilities(self):
        nd, _ = section3_family(0.3)
        assert float(nd.dist.probabilities[0]) == pytest.approx(0.3)
        assert float(sum(nd.dist.probabilities)) == 1.0

    def test_q_out_of_range(self):
        with pytest.raises(ValueError):
            section3_family(0.0)
        with pytest.raises(ValueError):
            section3_family(1.0)


class TestPrimeFamily:
    def test_three_coloring_base_reproduces_section3(self):
        # lifting the 3-colouring constraint gives the domain-5 family up to
        # value labels (which already agree under this construction)
        base = homomorphism_distribution(complete_graph_target(3))
        lifted = prime_family(base, 0.3)
        section3, _ = section3_family(0.3)
        assert set(lifted.dist.templates) == set(section3.dist.templates)
        got = {t: p for t, p in zip(lifted.dist.templates, lifted.dist.probabilities)}
        want = {t: p for t, p in zip(section3.dist.templates, section3.dist.probabilities)}
        assert got == want

    def test_mixed_tuples_violate_lifted_templates(self):
        base = dkt_distribution(2, 2, 1)
        lifted = prime_family(base, 0.4)
        for tpl in lifted.dist.templates:
            assert not template_satisfied(tpl, (1, 3))  # 3 = d+1 here

    def test_star_template_rule(self):
        base = dkt_distribution(2, 2, 1)
        lifted = prime_family(base, 0.4)
        star = lifted.dist.templates[-1]
        assert not template_satisfied(star, (3, 3))
        assert not template_satisfied(star, (4, 4))
        assert template_satisfied(star, (3, 4))
        assert template_satisfied(star, (1, 1))  # no constraint inside 1..d

    def test_probability_split(self):
        base = dkt_distribution(2, 2, 1)
        lifted = prime_family(base, Fraction(1, 4))
        assert lifted.dist.probabilities[-1] == Fraction(1, 4)
        assert sum(lifted.dist.probabilities[:-1]) == Fraction(3, 4)


class TestHomomorphismDistribution:
    def test_k3_gives_not_equal(self):
        nd = homomorphism_distribution(complete_graph_target(3))
        tpl = nd.dist.templates[0]
        assert tpl.restrictions == frozenset({(1, 1), (2, 2), (3, 3)})

    def test_single_loop_vertex_always_satisfiable(self):
        target = TargetHypergraph(1, 3, ((1, 1, 1),))
        nd = homomorphism_distribution(target)
        tpl = nd.dist.templates[0]
        assert tpl.num_restrictions == 0
        inst = CspInstance(4, 1, 3, nd.dist.templates, (((1, 2, 3), 0),))
        assert solve(inst) is not None

    def test_edgeless_target_unsatisfiable_with_any_constraint(self):
        target = TargetHypergraph(2, 2, ())
        nd = homomorphism_distribution(target)
        inst = CspInstance(2, 2, 2, nd.dist.templates, (((1, 2), 0),))
        assert solve(inst) is None

    def test_k2_instances_satisfiable_iff_bipartite(self):
        # 2-colouring oracle: breadth-first proper colouring attempt
        from collections import deque
        from csplab import Hypergraph, make_rng

        def bipartite(h: Hypergraph) -> bool:
            color = {}
            adj = {v: set() for v in range(1, h.n + 1)}
            for a, b in h.edges:
                adj[a].add(b)
                adj[b].add(a)
            for s in range(1, h.n + 1):
                if s in color:
                    continue
                color[s] = 0
                dq = deque([s])
                while dq:
                    x = dq.popleft()
                    for y in adj[x]:
                        if y not in color:
                            color[y] = 1 - color[x]
                            dq.append(y)
                        elif color[y] == color[x]:
                            return False
            return True

        nd = homomorphism_distribution(complete_graph_target(2))
        for seed in range(150):
            rng = make_rng(seed)
            n = int(rng.integers(2, 13))
            m = int(rng.integers(0, 2 * n))
            edges = []
            for _ in range(m):
                pair = rng.permutation(n)[:2] + 1
                edges.append((int(pair[0]), int(pair[1])))
            h = Hypergraph(n, tuple(edges))
            inst = CspInstance(n, 2, 2, nd.dist.templates,
                               tuple((e, 0) for e in edges))
            assert (solve(inst) is not None) == bipartite(h)


class TestSpecLanguage:
    @pytest.mark.parametrize("spec", ["dkt:2,2,1", "dkt:3,2,2", "ed3",
                                      "section3:0.35", "hom-k3"])
    def test_tag_regenerates_identical_distribution(self, spec):
        nd = distribution_from_spec(spec)
        again = distribution_from_spec(nd.tag)
        assert again.dist == nd.dist

    def test_prime_requires_base(self):
        with pytest.raises(ValueError):
            distribution_from_spec("prime:0.3")

    def test_prime_with_base(self):
        nd = distribution_from_spec("prime:0.3", base="dkt:2,2,1")
        assert nd.domain_size == 4

    def test_unknown_spec(self):
        with pytest.raises(ValueError):
            distribution_from_spec("nope:1")

    def test_all_builders_pass_distribution_invariants(self):
        specs = ["dkt:2,2,1", "dkt:2,3,3", "ed3", "section3:0.18", "hom-k3"]
        for spec in specs:
            nd = distribution_from_spec(spec)
            assert float(sum(nd.dist.probabilities)) == pytest.approx(1.0, abs=1e-12)
