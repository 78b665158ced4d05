"""Uniform-spanning-tree approximation of diag(pinv(L)) and the electrical
centrality measures built on it."""

from .baselines import BaselineConfig, bekas_diag
from .centrality import (Scores, electrical_closeness, electrical_farness,
                         kirchhoff_edge_centrality, kirchhoff_index, nrwb,
                         spanning_edge_resistance)
from .diag import (ApproxParams, DiagEstimate, ResistanceAccumulator, aggregate,
                   approx_diag, approx_diag_weighted, compute_eta, compute_tau,
                   exact_diag_estimate)
from .graph import (BfsTree, EdgeListError, Graph, bfs_tree,
                    biconnected_components, from_edges, generate_test_graph,
                    is_connected, largest_connected_component, load_csr_cache,
                    load_edge_list, save_csr_cache, to_edge_list_text, volume)
from .metrics import ErrorReport, compare
from .pivot import PivotChoice, select_pivot
from .records import (ERROR_REPORT_SCHEMA, RUN_RECORD_SCHEMA, make_run_record,
                      validate_error_report, validate_run_record)
from .solver import (DensePseudoinverse, SolveResult, SolverConfig,
                     SolverConvergenceError, cg_solve, dense_pinv_diag,
                     dense_pseudoinverse, laplacian_matvec, solve_pivot_column)
from .ust import (DfsTimestamps, RngState, SpanningTree, dfs_timestamps,
                  is_descendant, is_proper_descendant, wilson_sample,
                  wilson_sample_bcc)

__version__ = "0.1.0"
