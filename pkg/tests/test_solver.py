"""Solver, oracle, implication closures and bad-value analysis."""

from fractions import Fraction
from itertools import product

import pytest

from csplab import (BudgetExceeded, ConstraintDistribution, ConstraintTemplate,
                    CspInstance, EnumerationCapExceeded, bad_values,
                    brute_force, count_solutions, derive_seed, evaluate,
                    force_values, implication_closure, make_rng, plant,
                    sample_csp, sample_hat_csp, sample_unicyclic_csp, solve,
                    solve_excluding_value)
from csplab.distributions import dkt_distribution, example_ed3


def not_equal(d):
    return ConstraintTemplate(d, 2, frozenset((v, v) for v in range(1, d + 1)))


def full_template(d, k):
    return ConstraintTemplate(d, k, frozenset(product(range(1, d + 1), repeat=k)))


def ed3_instance(constraints, n):
    nd = example_ed3()
    return CspInstance(n, 3, 2, nd.dist.templates, constraints)


class TestSolveBasics:
    def test_empty_instance_is_satisfiable(self):
        inst = CspInstance(4, 3, 2, (), ())
        got = solve(inst)
        assert got is not None and evaluate(inst, got)

    def test_full_constraint_is_unsatisfiable(self):
        inst = CspInstance(2, 2, 2, (full_template(2, 2),), (((1, 2), 0),))
        assert solve(inst) is None

    def test_budget_exhaustion_raises(self):
        # a satisfiable 3-colouring instance needs one decision per variable
        from csplab.distributions import homomorphism_distribution
        from csplab import complete_graph_target
        nd = homomorphism_distribution(complete_graph_target(3))
        inst = sample_csp(40, 2.0 / 40, nd.dist, 5)
        assert solve(inst) is not None
        with pytest.raises(BudgetExceeded):
            solve(inst, max_nodes=1)

    def test_witnesses_always_pass_evaluate(self):
        nd = example_ed3()
        for seed in range(60):
            inst = sample_csp(25, 2.0 / 25, nd.dist, seed)
            got = solve(inst)
            if got is not None:
                assert evaluate(inst, got)


class TestBruteForce:
    def test_not_equal_triangle_d2_unsat(self):
        inst = CspInstance(3, 2, 2, (not_equal(2),),
                           (((1, 2), 0), ((2, 3), 0), ((3, 1), 0)))
        assert brute_force(inst) is None

    def test_not_equal_triangle_d3_lexicographically_smallest(self):
        inst = CspInstance(3, 3, 2, (not_equal(3),),
                           (((1, 2), 0), ((2, 3), 0), ((3, 1), 0)))
        assert brute_force(inst) == {1: 1, 2: 2, 3: 3}

    def test_respects_forced_domain(self):
        inst = force_values(CspInstance(1, 3, 2, (), ()), [(1, 2)])
        assert brute_force(inst) == {1: 2}

    def test_cap_refusal(self):
        inst = CspInstance(30, 3, 2, (), ())
        with pytest.raises(EnumerationCapExceeded):
            brute_force(inst, cap=1000)


class TestOracleEquivalence:
    def test_solve_matches_brute_force_on_mixed_instances(self):
        pool = [dkt_distribution(2, 2, 1).dist, dkt_distribution(3, 2, 2).dist,
                dkt_distribution(2, 3, 1).dist, dkt_distribution(2, 3, 3).dist,
                example_ed3().dist]
        rng = make_rng(31337)
        for i in range(300):
            dist = pool[i % len(pool)]
            k = dist.arity
            n = int(rng.integers(k, 12))
            c = float(rng.uniform(0, 4))
            p = min(c / n ** (k - 1), 1.0)
            sampler = sample_hat_csp if i % 3 == 0 else sample_csp
            inst = sampler(n, p, dist, derive_seed(4242, i))
            got = solve(inst)
            want = brute_force(inst)
            assert (got is None) == (want is None), f"disagreement at i={i}"
            if got is not None:
                assert evaluate(inst, got)


class TestSolveExcludingValue:
    def test_not_equal_triangle_needs_all_three_values(self):
        inst = ed3_instance((((1, 2), 1), ((2, 3), 1), ((3, 1), 1)), 3)
        assert solve_excluding_value(inst, 1) is None
        # oracle confirms: no proper 3-colouring of a triangle avoids a value
        for delta in (1, 2, 3):
            restricted = CspInstance(
                inst.n, 3, 2, inst.templates, inst.constraints,
                tuple(dom - {delta} for dom in inst.domains))
            assert brute_force(restricted) is None

    def test_empty_instance_satisfiable_excluding_any_value(self):
        inst = CspInstance(3, 3, 2, (), ())
        assert solve_excluding_value(inst, 2) is not None

    def test_path_of_two_not_equal_edges_without_value_one(self):
        inst = ed3_instance((((1, 2), 1), ((2, 3), 1)), 3)
        got = solve_excluding_value(inst, 1)
        assert got is not None
        assert 1 not in got.values()
        # brute-force oracle agrees it is possible
        restricted = CspInstance(3, 3, 2, inst.templates, inst.constraints,
                                 tuple(dom - {1} for dom in inst.domains))
        assert brute_force(restricted) is not None


class TestCountSolutions:
    def test_free_variables(self):
        assert count_solutions(CspInstance(2, 3, 2, (), ()), cap=100) == 9

    def test_not_equal_edge(self):
        inst = CspInstance(2, 3, 2, (not_equal(3),), (((1, 2), 0),))
        assert count_solutions(inst, cap=100) == 6

    def test_ed3_not_equal_triangle_has_six_colourings(self):
        inst = ed3_instance((((1, 2), 1), ((2, 3), 1), ((3, 1), 1)), 3)
        assert count_solutions(inst, cap=100) == 6

    def test_saturation(self):
        assert count_solutions(CspInstance(4, 3, 2, (), ()), cap=10) == 10


class TestImplicationClosure:
    def test_equality_chain_forces_ones(self):
        # two chained both-or-neither constraints propagate the value 1
        inst = ed3_instance((((1, 2), 0), ((2, 3), 0)), 3)
        closure = implication_closure(inst, 1, 1)
        assert closure.forced == {2: 1, 3: 1}
        assert closure.members(1) == frozenset({2, 3})
        assert not closure.truncated

    def test_source_value_two_forces_nothing(self):
        inst = ed3_instance((((1, 2), 0), ((2, 3), 0)), 3)
        closure = implication_closure(inst, 1, 2)
        assert closure.forced == {}

    def test_not_equal_never_forces_in_domain_three(self):
        inst = ed3_instance((((1, 2), 1), ((2, 3), 1)), 3)
        assert implication_closure(inst, 1, 1).forced == {}

    def test_isolated_variable(self):
        inst = ed3_instance((), 3)
        assert implication_closure(inst, 2, 1).forced == {}

    def test_chains_certify_each_step(self):
        nd = example_ed3()
        for seed in range(40):
            inst = sample_csp(40, 2.0 / 40, nd.dist, derive_seed(808, seed))
            closure = implication_closure(inst, 1, 1)
            for u, chain in closure.chains.items():
                # replay the chain: each step must force the next value
                var, val = 1, 1
                for ci, from_var, from_val in chain:
                    assert (from_var, from_val) == (var, val)
                    (a, b), tid = inst.constraints[ci]
                    tpl = inst.templates[tid]
                    if from_var == a:
                        compat = [y for y in (1, 2, 3)
                                  if (from_val, y) not in tpl.restrictions]
                        var = b
                    else:
                        compat = [y for y in (1, 2, 3)
                                  if (y, from_val) not in tpl.restrictions]
                        var = a
                    assert len(compat) == 1
                    val = compat[0]
                assert var == u and val == closure.forced[u]

    def test_conflicting_chains_set_truncation(self):
        # v=1 forces u=1 through an equality edge, but a second path through
        # a forcing gadget demands u=2: the closure flags the conflict
        force_to_2 = ConstraintTemplate(3, 2, frozenset({(1, 1), (1, 3)}))
        nd = example_ed3()
        templates = nd.dist.templates + (force_to_2,)
        inst = CspInstance(2, 3, 2, templates, (((1, 2), 0), ((1, 2), 2)))
        closure = implication_closure(inst, 1, 1)
        assert closure.truncated

    def test_k3_rejected(self):
        nd = dkt_distribution(2, 3, 1)
        inst = sample_csp(5, 0.1, nd.dist, 3)
        with pytest.raises(ValueError):
            implication_closure(inst, 1, 1)


class TestBadValues:
    def test_ed3_has_no_bad_values(self):
        assert bad_values(example_ed3().dist) == frozenset()

    def test_directly_forbidden_value(self):
        # template forbids value 2 in the first slot entirely
        rows = frozenset({(2, 1), (2, 2), (2, 3)})
        tpl = ConstraintTemplate(3, 2, rows)
        dist = ConstraintDistribution((tpl, not_equal(3)),
                                      (Fraction(1, 2), Fraction(1, 2)))
        assert bad_values(dist) == frozenset({2})

    def test_closure_through_forcing_chain(self):
        # add a template forcing 3 -> 2; with 2 bad, 3 becomes bad as well
        rows_forbid_2 = frozenset({(2, 1), (2, 2), (2, 3)})
        rows_force_3_to_2 = frozenset({(3, 1), (3, 3)})
        t1 = ConstraintTemplate(3, 2, rows_forbid_2)
        t2 = ConstraintTemplate(3, 2, rows_force_3_to_2)
        dist = ConstraintDistribution((t1, t2), (Fraction(1, 2), Fraction(1, 2)))
        assert bad_values(dist) == frozenset({2, 3})

    def test_k3_rejected(self):
        with pytest.raises(ValueError):
            bad_values(dkt_distribution(2, 3, 1).dist)


class TestMonotonicity:
    def test_adding_constraints_never_fixes_unsatisfiability(self):
        nd = example_ed3()
        checked = 0
        for seed in range(200):
            inst = sample_csp(10, 0.6, nd.dist, derive_seed(606, seed))
            if brute_force(inst) is not None:
                continue
            checked += 1
            extra = sample_csp(10, 0.15, nd.dist, derive_seed(607, seed))
            merged = CspInstance(
                10, 3, 2, nd.dist.templates,
                inst.constraints + extra.constraints)
            assert brute_force(merged) is None
        assert checked >= 5  # the sweep actually exercised unsatisfiable cases


class TestUnicyclicSparseFamilies:
    @pytest.mark.parametrize("d,k,t", [(2, 2, 1), (2, 3, 1), (3, 2, 2), (2, 3, 3)])
    def test_sparse_unicyclic_instances_satisfiable(self, d, k, t):
        nd = dkt_distribution(d, k, t)
        assert nd.nontrivial
        for i in range(60):
            inst = sample_unicyclic_csp(nd.dist, derive_seed(1010, d, k, t, i))
            got = solve(inst)
            assert got is not None and evaluate(inst, got)


class TestPlantVsForce:
    @pytest.mark.slow
    def test_forcing_an_assignment_dominates_planting(self):
        # unsat rate after forcing a satisfying assignment of M is at least
        # the rate after planting M (up to 3 combined standard errors);
        # budget-limited trials are excluded from both rates and must be rare
        import math

        def outcome(instance):
            try:
                return solve(instance, max_nodes=100_000) is None
            except BudgetExceeded:
                return None

        nd = example_ed3()
        tri = CspInstance(3, 3, 2, nd.dist.templates,
                          (((1, 2), 1), ((2, 3), 1), ((3, 1), 1)))
        assignment = brute_force(tri)
        assert assignment is not None
        n, c, runs = 150, 2.0, 500
        planted_outcomes = []
        forced_outcomes = []
        for i in range(runs):
            base = sample_csp(n, c / n, nd.dist, derive_seed(2020, i))
            planted = plant(base, tri, derive_seed(2021, i))
            rng = make_rng(derive_seed(2022, i))
            targets = [int(v) + 1 for v in rng.permutation(n)[:3]]
            forced = force_values(base, [(tv, assignment[j + 1])
                                         for j, tv in enumerate(targets)])
            planted_outcomes.append(outcome(planted))
            forced_outcomes.append(outcome(forced))
        indet = planted_outcomes.count(None) + forced_outcomes.count(None)
        assert indet <= 0.05 * 2 * runs
        n1 = sum(x is not None for x in planted_outcomes)
        n2 = sum(x is not None for x in forced_outcomes)
        p1 = sum(x is True for x in planted_outcomes) / n1
        p2 = sum(x is True for x in forced_outcomes) / n2
        se = math.sqrt(p1 * (1 - p1) / n1 + p2 * (1 - p2) / n2)
        assert p2 >= p1 - 3 * se
