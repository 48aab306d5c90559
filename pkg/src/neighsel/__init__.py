"""Neighborhood selection for sparse Gaussian graphical models.

Estimates the conditional independence graph of a high-dimensional
Gaussian by fitting one L1-penalized regression per node and combining
the resulting neighborhoods into an edge set.
"""
from .errors import (
    ConstantColumn,
    DomainError,
    EmptyPath,
    FoldTooSmall,
    GridError,
    InconsistentP,
    MaxIterations,
    MleDoesNotExist,
    NeighselError,
    NotPositiveDefinite,
    NotUnique,
    ParseError,
    RaggedRow,
)
from .numeric import (
    DataMatrix,
    SymMatrix,
    cholesky,
    derive_seed,
    gaussian_tail_quantile,
    invert_spd,
    standardize,
    substream,
)
from .lasso import (
    GramCache,
    LassoFit,
    LassoProblem,
    full_gram,
    kkt_residual,
    lambda_max,
    lasso_fit,
    lasso_objective,
    lasso_path,
)
from .neighborhood import (
    AlphaPenalty,
    CvPenalty,
    FixedPenalty,
    NeighborhoodSet,
    PenaltyValue,
    cv_lambda,
    estimate_all_neighborhoods,
    estimate_neighborhood,
    lambda_alpha,
)
from .graph import (
    ComponentPartition,
    EdgeSet,
    Metrics,
    aggregate_and,
    aggregate_or,
    compare_edge_sets,
    connected_components,
    roc_at_false_counts,
)
from .synth import (
    GgmModel,
    TrueGraph,
    build_model,
    build_precision,
    contaminate_t2,
    covariance_from_precision,
    generate_geometric_graph,
    neighborhood_stability,
    partial_correlation,
    population_coefficients,
    population_diagnostics,
    sample_gaussian,
)
from .baselines import (
    ForwardSelection,
    MleFit,
    forward_select,
    gaussian_loglik,
    ipf_fit,
    maximal_cliques,
    random_guess_baseline,
)
from .formats import (
    FORMAT_VERSION,
    canonical_json,
    load_csv,
    read_edges,
    read_json,
    read_model,
    write_csv,
    write_edges,
    write_json,
    write_model,
)
from .experiments import (
    ExperimentConfig,
    ExperimentReport,
    calibrate_kernel,
    load_report,
    run_experiment,
    run_figure1,
    run_level_control,
    run_prop1_demo,
    run_robustness,
    run_table1,
    write_report,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaPenalty",
    "ComponentPartition",
    "ConstantColumn",
    "CvPenalty",
    "DataMatrix",
    "DomainError",
    "EdgeSet",
    "EmptyPath",
    "ExperimentConfig",
    "ExperimentReport",
    "FORMAT_VERSION",
    "FixedPenalty",
    "FoldTooSmall",
    "ForwardSelection",
    "GgmModel",
    "GramCache",
    "GridError",
    "InconsistentP",
    "LassoFit",
    "LassoProblem",
    "MaxIterations",
    "Metrics",
    "MleDoesNotExist",
    "MleFit",
    "NeighborhoodSet",
    "NeighselError",
    "NotPositiveDefinite",
    "NotUnique",
    "ParseError",
    "PenaltyValue",
    "RaggedRow",
    "SymMatrix",
    "TrueGraph",
    "aggregate_and",
    "aggregate_or",
    "build_model",
    "build_precision",
    "calibrate_kernel",
    "canonical_json",
    "cholesky",
    "compare_edge_sets",
    "connected_components",
    "contaminate_t2",
    "covariance_from_precision",
    "cv_lambda",
    "derive_seed",
    "estimate_all_neighborhoods",
    "estimate_neighborhood",
    "forward_select",
    "full_gram",
    "gaussian_loglik",
    "gaussian_tail_quantile",
    "generate_geometric_graph",
    "invert_spd",
    "ipf_fit",
    "kkt_residual",
    "lambda_alpha",
    "lambda_max",
    "lasso_fit",
    "lasso_objective",
    "lasso_path",
    "load_csv",
    "load_report",
    "maximal_cliques",
    "neighborhood_stability",
    "partial_correlation",
    "population_coefficients",
    "population_diagnostics",
    "random_guess_baseline",
    "read_edges",
    "read_json",
    "read_model",
    "roc_at_false_counts",
    "run_experiment",
    "run_figure1",
    "run_level_control",
    "run_prop1_demo",
    "run_robustness",
    "run_table1",
    "sample_gaussian",
    "standardize",
    "substream",
    "write_csv",
    "write_edges",
    "write_json",
    "write_model",
    "write_report",
    "__version__",
]
