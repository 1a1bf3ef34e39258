"""Minimum-cost (strongly) separating set systems for causal discovery."""

from .causal import RecoveryReport, Scm, ci_oracle, random_scm, recover_ancestral, recover_directions, true_ancestral
from .errors import BudgetExceeded, OracleLimitError, PreconditionError
from .graph import (
    CostGraph,
    InterventionMatrix,
    SeparationMode,
    dumps_graph,
    dumps_matrix,
    is_eps_separating,
    is_separated,
    is_strongly_separated,
    loads_graph,
    loads_matrix,
    matrix_cost,
    unseparated_edges,
)
from .harness import ExperimentRow, ExperimentSpec, run_experiment
from .hyperfinite import GraphPartition, bfs_partitioner, hyperfinite_design, hyperfinite_near_mis
from .nearmis import IsSearchConfig, NearMisResult, bucket_by_cost, exact_mis, independent_set_search, near_mis
from .sepmatrix import PeelHistory, SupernodeSet, ancestral_design, contract_supernodes, eps_separating_matrix, exact_min_separating, ss_matrix_complete
from .setsystems import (
    eps_separating_large_m,
    eps_strongly_separating_large_m,
    separating_2logn,
    strongly_separating_logn,
    vertex_cover_2approx,
)

