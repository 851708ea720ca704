"""Graph selection for binary pairwise (+-1) Markov random fields via nodewise
L1-penalized logistic regression and information-criterion scoring."""

from .diag import (
    AssumptionReport,
    CounterexampleReport,
    assumptions_from_params,
    assumptions_from_samples,
    counterexample_run,
    sparse_eig_floor,
    sparse_eig_floor_check,
    likelihood_ratio_monitor,
    sparse_eig_bounds,
    third_moment_bound,
)
from .errors import CapacityError
from .glm import (
    LassoPath,
    RegressionData,
    RegressionFit,
    cumulant,
    cumulant_d1,
    cumulant_d2,
    fit_mle,
    kkt_max_violation,
    lambda_max,
    lasso_path,
    lasso_path_at,
    loglik_score_hessian,
)
from .ising import (
    EXACT_MAX_P,
    Graph,
    IsingParams,
    SampleMatrix,
    conditional_logit,
    enumerate_states,
    exact_distribution,
    exact_sample,
    generate_lattice,
    generate_star,
    gibbs_sample,
)
from .metrics import (
    GraphMetrics,
    StationLayout,
    pairwise_distance,
    psr_fdr,
    smoothed_edge_probability,
)
from .rng import RngSeed
from .select import (
    BicConfig,
    NodeSelection,
    SelectionReport,
    bic_gamma,
    neighborhood_select_bic,
    neighborhood_select_cv,
    neighborhood_select_stability,
    node_regression,
    select_graph,
    select_graph_bic_sweep,
)
from .simulate import ExperimentConfig, run_replicate, run_simulation, scenario_sample_size

__version__ = "0.1.0"

__all__ = [
    "AssumptionReport",
    "BicConfig",
    "CapacityError",
    "CounterexampleReport",
    "EXACT_MAX_P",
    "ExperimentConfig",
    "Graph",
    "GraphMetrics",
    "IsingParams",
    "LassoPath",
    "NodeSelection",
    "RegressionData",
    "RegressionFit",
    "RngSeed",
    "SampleMatrix",
    "SelectionReport",
    "StationLayout",
    "assumptions_from_params",
    "assumptions_from_samples",
    "bic_gamma",
    "conditional_logit",
    "counterexample_run",
    "cumulant",
    "cumulant_d1",
    "cumulant_d2",
    "enumerate_states",
    "exact_distribution",
    "exact_sample",
    "fit_mle",
    "generate_lattice",
    "generate_star",
    "gibbs_sample",
    "kkt_max_violation",
    "lambda_max",
    "lasso_path",
    "lasso_path_at",
    "sparse_eig_floor",
    "sparse_eig_floor_check",
    "likelihood_ratio_monitor",
    "loglik_score_hessian",
    "neighborhood_select_bic",
    "neighborhood_select_cv",
    "neighborhood_select_stability",
    "node_regression",
    "pairwise_distance",
    "psr_fdr",
    "run_replicate",
    "run_simulation",
    "scenario_sample_size",
    "select_graph",
    "select_graph_bic_sweep",
    "smoothed_edge_probability",
    "sparse_eig_bounds",
    "third_moment_bound",
]
