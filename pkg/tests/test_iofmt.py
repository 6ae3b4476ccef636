"""Text-format parsing, emission and round-trip identity."""

import pytest

from csplab import (ConstraintTemplate, CspInstance, ParseError, derive_seed,
                    emit_distribution, emit_instance, emit_target, forbid_values,
                    force_values, parse_distribution, parse_instance,
                    parse_target, sample_csp, sample_hat_csp)
from csplab.distributions import dkt_distribution, example_ed3, section3_family


class TestInstanceFormat:
    def test_minimal_document(self):
        text = """\
# small example
csp 3 2 2
t 0 1
r 1 1
c 1 2 0
c 2 3 0
u 3 2
"""
        inst = parse_instance(text)
        assert inst.n == 3 and inst.domain_size == 2 and inst.arity == 2
        assert len(inst.constraints) == 2
        assert inst.domains[2] == frozenset({2})

    def test_round_trip_handmade(self):
        t = ConstraintTemplate(3, 2, frozenset({(1, 2), (2, 1)}))
        inst = CspInstance(4, 3, 2, (t,), (((2, 1), 0), ((3, 4), 0)))
        inst = force_values(inst, [(1, 2)])
        assert parse_instance(emit_instance(inst)) == inst

    def test_empty_domain_round_trips(self):
        inst = force_values(CspInstance(2, 2, 2, (), ()), [(1, 1), (1, 2)])
        # the second force empties the domain
        inst = force_values(inst, [(1, 2)])
        assert inst.trivially_unsatisfiable
        assert parse_instance(emit_instance(inst)) == inst

    def test_round_trip_sampled_instances(self):
        for i in range(60):
            nd = example_ed3() if i % 2 else dkt_distribution(2, 3, 2)
            sampler = sample_hat_csp if i % 3 == 0 else sample_csp
            n = 6 + i % 7
            inst = sampler(n, 0.2, nd.dist, derive_seed(313, i))
            if i % 4 == 0:
                inst = forbid_values(inst, [(1, 1)])
            assert parse_instance(emit_instance(inst)) == inst

    @pytest.mark.parametrize("bad,what", [
        ("csp 2 2\nc 1 2 0\n", "header"),
        ("t 0 0\ncsp 2 2 2\n", "header must come first"),
        ("csp 2 2 2\nc 1 3 0\n", "outside"),
        ("csp 2 2 2\nc 1 2 0\n", "unknown template"),
        ("csp 2 2 2\nt 0 1\nr 1 3\n", "outside"),
        ("csp 2 2 2\nt 0 2\nr 1 1\n", "missing"),
        ("csp 2 2 2\nt 0 1\nr 1 1\nt 0 0\n", "duplicate template id"),
        ("csp 2 2 2\nu 1 1\nu 1 2\n", "duplicate domain"),
        ("csp 2 2 2\nx 1\n", "unknown record"),
        ("csp 2 2 2\nt 0 1\nr 1 1\nr 2 2\n", "outside a template block"),
    ])
    def test_errors_carry_line_numbers(self, bad, what):
        with pytest.raises(ParseError) as err:
            parse_instance(bad)
        assert "line" in str(err.value)
        assert what.split()[0] in str(err.value)

    def test_comments_and_blank_lines_ignored(self):
        text = "\n# hi\ncsp 1 2 2   # trailing\n\n"
        inst = parse_instance(text)
        assert inst.n == 1


class TestDistributionFormat:
    def test_round_trip_named_families(self):
        for nd in (dkt_distribution(2, 2, 1), example_ed3(),
                   section3_family(0.3)[0]):
            text = emit_distribution(nd.dist)
            assert parse_distribution(text) == nd.dist

    def test_probability_lines_required(self):
        text = "dist 2 2\nt 0 1\nr 1 1\n"
        with pytest.raises(ParseError):
            parse_distribution(text)

    def test_rational_probabilities_exact(self):
        text = emit_distribution(example_ed3().dist)
        assert "p 0 2 3" in text
        assert "p 1 1 3" in text


class TestTargetFormat:
    def test_round_trip(self):
        from csplab import complete_graph_target
        h = complete_graph_target(3)
        assert parse_target(emit_target(h)) == h

    def test_header_required(self):
        with pytest.raises(ParseError):
            parse_target("e 1 2\n")

    def test_vertex_range_checked(self):
        with pytest.raises(ParseError):
            parse_target("hg 2 2\ne 1 3\n")
