"""Exponential first-passage percolation and push broadcast on configuration-model graphs."""
from fpplab.branching import BranchingTrace, population_at_time, simulate_branching
from fpplab.broadcast import (BroadcastConstants, BroadcastTrace, async_push, broadcast_constants,
                              coupled_async, sync_push)
from fpplab.degrees import (DegreeDistribution, DegreeSequence, SizeBiasedDistribution,
                            TheoreticalConstants, sample_degree_sequence, size_biased,
                            theoretical_constants)
from fpplab.errors import (ConfigError, DegenerateDistributionError, DisconnectedGraphError,
                           FPPLabError, OutOfScopeError, ParityError, RegularityError, RejectionError)
from fpplab.exploration import (ExplorationTrace, GrowthConstants, build_by_exploration,
                                event_frequencies, explore, explore_graph, growth_constants,
                                hitting_time)
from fpplab.fpp import (DistanceProfile, WeightedGraph, assign_weights, count_bad_vertices,
                        flood_time, hop_diameter, shortest_weighted_distances, weighted_diameter)
from fpplab.graph import CompleteGraph, Multigraph, is_connected, pair_half_edges, sample_simple
from fpplab.harness import ExperimentRecord, PrefactorFit, fit_prefactor, parse_config, run_sweep
from fpplab.kernels import BACKEND

hitting_times = hitting_time

__version__ = "0.1.0"
