"""Homomorphism search, triangle detection and the constructive mappings."""

import pytest

from csplab import (Hypergraph, complete_graph_target, cycle_graph_target,
                    derive_seed, has_homomorphism, has_triangle, make_rng,
                    random_unicyclic_graph, random_unicyclic_hypergraph,
                    ring_homomorphism, single_edge_target, unicyclic_to_edge,
                    verify_homomorphism)
from csplab.homomorphism import TargetHypergraph, find_unique_cycle
from csplab.hypergraph import distances_from


def triangle_graph() -> Hypergraph:
    return Hypergraph(3, ((1, 2), (2, 3), (3, 1)))


def cycle_graph(m: int) -> Hypergraph:
    return Hypergraph(m, tuple((i, i % m + 1) for i in range(1, m + 1)))


def petersen_target() -> TargetHypergraph:
    outer = [(1, 2), (2, 3), (3, 4), (4, 5), (5, 1)]
    spokes = [(i, i + 5) for i in range(1, 6)]
    inner = [(6, 8), (8, 10), (10, 7), (7, 9), (9, 6)]
    return TargetHypergraph(10, 2, tuple(outer + spokes + inner))


class TestHasHomomorphism:
    def test_k3_to_k3_identity_exists(self):
        mapping = has_homomorphism(triangle_graph(), complete_graph_target(3))
        assert mapping is not None
        assert verify_homomorphism(triangle_graph(), complete_graph_target(3), mapping)

    def test_k3_to_c5_rejected(self):
        assert has_homomorphism(triangle_graph(), cycle_graph_target(5)) is None

    def test_c5_to_k3_exists(self):
        mapping = has_homomorphism(cycle_graph(5), complete_graph_target(3))
        assert mapping is not None
        assert verify_homomorphism(cycle_graph(5), complete_graph_target(3), mapping)

    def test_odd_cycle_to_even_cycle_rejected(self):
        assert has_homomorphism(cycle_graph(7), cycle_graph_target(4)) is None

    def test_arity_mismatch_raises(self):
        g = Hypergraph(3, ((1, 2, 3),))
        with pytest.raises(ValueError):
            has_homomorphism(g, complete_graph_target(3))

    def test_agreement_with_csp_solver(self):
        # dual route: the same question asked as a CSP of the target's
        # permitted-tuples template must decide identically
        from csplab import CspInstance, solve
        from csplab.distributions import homomorphism_distribution

        targets = [complete_graph_target(3), cycle_graph_target(5),
                   cycle_graph_target(4), petersen_target()]
        for seed in range(120):
            rng = make_rng(derive_seed(1234, seed))
            n = int(rng.integers(2, 11))
            m = int(rng.integers(0, 2 * n))
            edges = []
            for _ in range(m):
                pair = rng.permutation(n)[:2] + 1
                edges.append((int(pair[0]), int(pair[1])))
            g = Hypergraph(n, tuple(edges))
            target = targets[seed % len(targets)]
            nd = homomorphism_distribution(target)
            inst = CspInstance(n, target.n, 2, nd.dist.templates,
                               tuple((e, 0) for e in edges))
            assert (has_homomorphism(g, target) is not None) == \
                   (solve(inst) is not None)


class TestHasTriangle:
    def test_k3(self):
        assert has_triangle(complete_graph_target(3))

    def test_c5(self):
        assert not has_triangle(cycle_graph_target(5))

    def test_petersen_is_triangle_free(self):
        # oracle: brute-force scan over all vertex triples
        h = petersen_target()
        triples = [(a, b, c)
                   for a in range(1, 11) for b in range(a + 1, 11)
                   for c in range(b + 1, 11)
                   if (a, b) in h.edge_lookup and (b, c) in h.edge_lookup
                   and (a, c) in h.edge_lookup]
        assert triples == []
        assert not has_triangle(h)


class TestFindUniqueCycle:
    def test_triangle(self):
        vs, es = find_unique_cycle(triangle_graph())
        assert sorted(vs) == [1, 2, 3]
        assert len(es) == 3

    def test_cycle_with_pendant_tree(self):
        g = Hypergraph(6, ((1, 2), (2, 3), (3, 1), (3, 4), (4, 5), (4, 6)))
        vs, es = find_unique_cycle(g)
        assert sorted(vs) == [1, 2, 3]

    def test_two_edge_cycle_in_three_uniform(self):
        g = Hypergraph(4, ((1, 2, 3), (2, 3, 4)))
        vs, es = find_unique_cycle(g)
        assert len(vs) == 2 and len(es) == 2

    def test_rejects_trees_and_multicyclic(self):
        with pytest.raises(ValueError):
            find_unique_cycle(Hypergraph(3, ((1, 2), (2, 3))))
        with pytest.raises(ValueError):
            find_unique_cycle(Hypergraph(4, tuple(
                (a, b) for a in range(1, 5) for b in range(a + 1, 5))))


class TestUnicyclicToEdge:
    def test_three_uniform_cycle_of_length_three(self):
        g = random_unicyclic_hypergraph(3, 3, 0, 7)
        mapping = unicyclic_to_edge(g)
        assert verify_homomorphism(g, single_edge_target(3), mapping)

    def test_cycle_with_pendant_edges(self):
        g = random_unicyclic_hypergraph(3, 4, 5, 11)
        mapping = unicyclic_to_edge(g)
        assert verify_homomorphism(g, single_edge_target(3), mapping)

    def test_k2_rejected(self):
        with pytest.raises(ValueError):
            unicyclic_to_edge(triangle_graph())

    def test_200_random_unicyclic_hypergraphs(self):
        rng = make_rng(2024)
        for i in range(200):
            k = int(rng.integers(3, 5))
            cycle_len = int(rng.integers(2, 7))
            tree_edges = int(rng.integers(0, 8))
            g = random_unicyclic_hypergraph(k, cycle_len, tree_edges,
                                            derive_seed(77, i))
            mapping = unicyclic_to_edge(g)
            assert verify_homomorphism(g, single_edge_target(k), mapping)


class TestRingHomomorphism:
    def test_triangle_with_long_path_endpoint_maps_to_u(self):
        # triangle 1-2-3 with a path of length r hanging off vertex 3
        h = complete_graph_target(4)
        r = h.n + 3
        edges = [(1, 2), (2, 3), (3, 1)]
        prev = 3
        for i in range(r):
            edges.append((prev, 4 + i))
            prev = 4 + i
        m = Hypergraph(3 + r, tuple(edges))
        u = 2
        mapping = ring_homomorphism(m, h, u, r)
        assert verify_homomorphism(m, h, mapping)
        assert mapping[3 + r] == u  # the path endpoint sits at distance r

    def test_all_distance_r_vertices_map_to_u(self):
        h = complete_graph_target(4)
        r = h.n + 3
        for seed in range(30):
            m = random_unicyclic_graph(int(make_rng(seed).integers(3, 6)), 12,
                                       derive_seed(31, seed))
            mapping = ring_homomorphism(m, h, 1, r)
            assert verify_homomorphism(m, h, mapping)
            cycle_vs, _ = find_unique_cycle(m)
            dist = distances_from(m, cycle_vs)
            for v, dv in dist.items():
                if dv == r:
                    assert mapping[v] == 1

    def test_no_vertex_at_distance_r_is_vacuous(self):
        h = complete_graph_target(4)
        mapping = ring_homomorphism(triangle_graph(), h, 1, h.n + 3)
        assert verify_homomorphism(triangle_graph(), h, mapping)

    def test_triangle_free_target_rejected(self):
        with pytest.raises(ValueError):
            ring_homomorphism(triangle_graph(), cycle_graph_target(5), 1, 8)

    def test_small_r_rejected(self):
        h = complete_graph_target(4)
        with pytest.raises(ValueError):
            ring_homomorphism(triangle_graph(), h, 1, h.n + 2)


class TestLemmaScaleProperties:
    def test_200_unicyclic_graphs_homomorphic_to_triangle_containing_targets(self):
        targets = [complete_graph_target(3), complete_graph_target(4)]
        rng = make_rng(555)
        for i in range(200):
            cycle_len = int(rng.integers(3, 9))
            tree_edges = int(rng.integers(0, 8))
            g = random_unicyclic_graph(cycle_len, tree_edges, derive_seed(99, i))
            target = targets[i % 2]
            mapping = has_homomorphism(g, target)
            assert mapping is not None
            assert verify_homomorphism(g, target, mapping)
