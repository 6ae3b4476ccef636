"""csplab: a random constraint-satisfaction phase-transition laboratory.

Generate instances from two random CSP models, decide them exactly, analyze
forcing-chain criticality from the distribution alone, and measure how fast
empirical satisfiability transitions sharpen with instance size.
"""

__version__ = "0.1.0"

from .criticality import (CriticalityReport, MeanMatrix, classify,
                          coarse_witness_value, critical_constants,
                          forcing_weight, mean_matrix, monte_carlo_growth,
                          spectral_radius)
from .distributions import (NamedDistribution, dkt_distribution,
                            distribution_from_spec, example_ed3,
                            homomorphism_distribution, prime_family,
                            section3_family)
from .homomorphism import (TargetHypergraph, complete_graph_target,
                           cycle_graph_target, has_homomorphism, has_triangle,
                           ring_homomorphism, single_edge_target,
                           unicyclic_to_edge, verify_homomorphism)
from .hypergraph import (Component, Hypergraph, classify_components,
                         constraint_hypergraph, contract, distance,
                         is_unicyclic, neighborhood_forest_check,
                         random_unicyclic_graph, random_unicyclic_hypergraph)
from .iofmt import (ParseError, emit_distribution, emit_instance, emit_target,
                    parse_distribution, parse_instance, parse_target)
from .model import (Assignment, ConstraintDistribution, ConstraintTemplate,
                    CspInstance, Digraph, count_two_cycles, evaluate,
                    forbid_values, force_values, plant, sample_csp,
                    sample_digraph, sample_hat_csp, sample_unicyclic_csp,
                    template_satisfied, underlying_edges)
from .rng import derive_seed, make_rng
from .scanner import (CellResult, ScanResult, SharpnessVerdict,
                      ThresholdEstimate, TransitionWindow, estimate_sat_prob,
                      scan, sharpness_verdict, threshold_estimate,
                      transition_window, wilson_interval)
from .solver import (BudgetExceeded, EnumerationCapExceeded,
                     ImplicationClosure, bad_values, brute_force,
                     count_solutions, implication_closure, solve,
                     solve_excluding_value)
