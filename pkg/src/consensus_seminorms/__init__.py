"""Consensus seminorms of matrices, contraction certificates, and
convergence-rate simulation for infinite stochastic matrix products."""

from ._backend import available_backends, current_backend, set_backend
from .certify import (
    CertificationError,
    ContractionCertificate,
    CounterexampleReport,
    MatrixClassReport,
    certify_induced_inf,
    certify_metric_inf,
    classify,
    counterexample_matrix,
    feasibility_matrix,
    verify_counterexample,
)
from .lp import (
    CertificateError,
    LinearProgram,
    LpOutcome,
    SimplexError,
    StrictFeasibilityResult,
    chebyshev_center_lp,
    solve,
    strict_feasibility,
    verify_farkas,
)
from .matcore import (
    CenteringProjection,
    EqualRowSumMatrix,
    Matrix,
    MatrixParseError,
    MatrixValidationError,
    PatternMatrix,
    StochasticMatrix,
    as_equal_row_sum,
    as_matrix,
    centering,
    consensus_projector,
    equal_row_sum,
    load_matrix,
    pattern,
    row_sums,
    save_matrix_csv,
    save_matrix_json,
    validate_stochastic,
)
from .products import (
    EquivalenceEstimate,
    MatrixEnsemble,
    ProductLimitError,
    RateReport,
    SimulationTrace,
    certify_rate,
    estimate_equivalence,
    product_limit,
    random_doubly_stochastic,
    random_equal_row_sum,
    random_scrambling,
    random_stochastic,
    ratio_extremes,
    run_product,
)
from .seminorms import (
    ColumnSplit,
    EigenSolveError,
    SeminormValue,
    batch_vector_seminorm,
    ergodicity_coefficient,
    induced_p2,
    induced_pinf,
    induced_pinf_witness,
    induced_sampling_lower_bound,
    matrix_seminorm,
    metric_p1,
    metric_p1_split,
    metric_p2,
    metric_pinf,
    parse_p,
    parse_seminorm_token,
    vector_seminorm,
)

__version__ = "0.1.0"
