"""Rank-truncated structured low-rank approximations of SPSD matrices,
their lifts through monotone scalar functions, and verification suites
for the inequalities connecting the two.

The core pipeline is: build an orthonormal basis Q (Gaussian sketch,
subspace iteration, block Krylov, or randomly pivoted column
selection), form the structured approximation A Q (Q^T A Q)^+ Q^T A in
factored form, truncate it to rank k, and map the retained eigenvalues
through a scalar function to approximate f(A). The metrics and
experiments modules measure how far each stage is from the optimal
rank-k approximation and check every supported inequality numerically.
"""

from .errors import (
    DimensionMismatchError,
    DomainError,
    InvalidPError,
    MatrixFileError,
    MismatchWithPaperError,
    NotPsdError,
    NotSymmetricError,
    PropertyViolationError,
    RankOutOfRangeError,
)
from .experiments import (
    BUNDLED_FIGURES,
    CSV_HEADER,
    ExpectationReport,
    ExperimentConfig,
    ExperimentRow,
    expectation_bound_report,
    exponential_spectrum,
    figure1_config,
    figure2_config,
    figure3_config,
    frobenius_sweep_violations,
    generate_matrix,
    harmonic_spectrum,
    kernel_power,
    ordering_violations,
    rows_to_csv,
    run_experiment,
    verify_counterexamples,
    write_csv,
)
from .functions import (
    ConcaveReport,
    MonotoneReport,
    ScalarFunction,
    apply_matrix_function,
    catalog_names,
    check_concave_properties,
    check_operator_monotone,
    get_function,
    parse_function,
)
from .linalg import (
    FROBENIUS,
    NUCLEAR,
    OPERATOR,
    LowRankFactor,
    NormKind,
    Projector,
    SpsdMatrix,
    best_rank_k,
    dense_entries,
    psd_order,
    schatten_from_values,
    schatten_norm,
    sym_eig,
)
from .metrics import (
    THEOREM_IDS,
    ApproxEvaluation,
    ErrorReport,
    TheoremInstance,
    TheoremVerdict,
    error_report,
    evaluate_approximations,
    random_instance,
    remark_checks,
    report_from_evaluation,
    run_theorem_suite,
    sketch_instance,
    verdict_lines,
    verdicts_to_json,
    verify_theorem,
)
from .mmio import read_dense, read_matrix, write_matrix
from .nystrom import (
    RectFactor,
    funnystrom,
    nystrom_truncated,
    projection_one_sided,
    projection_two_sided,
)
from .sketch import (
    OrthonormalBasis,
    Provenance,
    SketchConfig,
    explicit_basis,
    gaussian_basis,
    krylov_basis,
    orthonormal_columns,
    rng_for,
    rpcholesky_basis,
    standard_basis,
)

__version__ = "1.0.0"

__all__ = [
    "ApproxEvaluation",
    "BUNDLED_FIGURES",
    "CSV_HEADER",
    "ConcaveReport",
    "DimensionMismatchError",
    "DomainError",
    "ErrorReport",
    "ExpectationReport",
    "ExperimentConfig",
    "ExperimentRow",
    "FROBENIUS",
    "InvalidPError",
    "LowRankFactor",
    "MatrixFileError",
    "MismatchWithPaperError",
    "MonotoneReport",
    "NUCLEAR",
    "NormKind",
    "NotPsdError",
    "NotSymmetricError",
    "OPERATOR",
    "OrthonormalBasis",
    "Projector",
    "PropertyViolationError",
    "Provenance",
    "RankOutOfRangeError",
    "RectFactor",
    "ScalarFunction",
    "SketchConfig",
    "SpsdMatrix",
    "THEOREM_IDS",
    "TheoremInstance",
    "TheoremVerdict",
    "apply_matrix_function",
    "best_rank_k",
    "catalog_names",
    "check_concave_properties",
    "check_operator_monotone",
    "dense_entries",
    "error_report",
    "evaluate_approximations",
    "expectation_bound_report",
    "explicit_basis",
    "exponential_spectrum",
    "figure1_config",
    "figure2_config",
    "figure3_config",
    "frobenius_sweep_violations",
    "funnystrom",
    "gaussian_basis",
    "generate_matrix",
    "get_function",
    "harmonic_spectrum",
    "kernel_power",
    "krylov_basis",
    "nystrom_truncated",
    "ordering_violations",
    "orthonormal_columns",
    "parse_function",
    "projection_one_sided",
    "projection_two_sided",
    "psd_order",
    "random_instance",
    "read_dense",
    "read_matrix",
    "remark_checks",
    "report_from_evaluation",
    "rng_for",
    "rows_to_csv",
    "rpcholesky_basis",
    "run_experiment",
    "run_theorem_suite",
    "schatten_from_values",
    "schatten_norm",
    "sketch_instance",
    "standard_basis",
    "sym_eig",
    "verdict_lines",
    "verdicts_to_json",
    "verify_counterexamples",
    "verify_theorem",
    "write_csv",
    "write_matrix",
]
