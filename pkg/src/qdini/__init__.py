"""Numerical convergence diagnostics for entropic functionals.

Finite-dimensional operators, spectral truncation schemes, projector
schedules, and windowed trend verdicts for dominated-convergence style
statements about entropy, relative entropy and channel mutual information.
"""

from .extreal import INFINITY, ExtendedReal, finite
from .operators import (
    DensityOperator,
    HermitianOperator,
    LinearAlgebraError,
    PositiveOperator,
    Projector,
    SpectralDecomposition,
    apply_spectral_function,
    as_density,
    as_positive,
    coordinate_projector,
    default_rank_tol,
    dense_materialization_count,
    eigh,
    identity,
    moore_penrose_inverse,
    operator_from_json,
    operator_to_json,
    partial_trace,
    purify,
    support_projector,
    tensor,
    trace_norm_distance,
    zero_operator,
)
from .entropies import (
    LadderResult,
    binary_entropy,
    binary_entropy_extension,
    check_entropy_subadditivity_pair,
    compressed_entropy_pair,
    eta,
    quantum_mutual_information,
    regularized_log_ladder,
    relative_entropy,
    trace_neg_log,
    von_neumann_entropy,
)
from .channels import (
    Channel,
    ChannelSequence,
    channel_from_json,
    channel_from_kraus,
    channel_mutual_information,
    channel_to_json,
    choi_matrix,
    coherent_information,
    complementary_channel,
    depolarizing_channel,
    identity_channel,
    output_entropy,
    phase_damping_channel,
    reduced_kraus,
    strong_convergence_probe,
)
from .truncation import (
    ApproximationScheme,
    OperatorSequence,
    ProjectorSchedule,
    TruncationResult,
    commuting_schedule,
    commutator_norm,
    constant_sequence,
    dominated_truncation,
    fixed_basis_schedule,
    largest_stable_index,
    normalize,
    spectral_truncation,
    stable_index_set,
    top_multiplicity,
    truncated_state_entropy_bound,
    validate_schedule,
)
from .verdicts import (
    CONSISTENT,
    INCONCLUSIVE,
    VIOLATED,
    CheckResult,
    DiagnosticsGrid,
    GridCell,
    TrendSummary,
    Verdict,
    dumps_canonical,
    residual_shrinks,
    shrinks_toward_zero,
    windowed_sup,
)
from .diagnostics import (
    FunctionalFamily,
    ModulusFunction,
    appendix_domination,
    approximation_gap_grid,
    channel_mi_checks,
    channel_mi_family,
    check_convex_mixture,
    check_dct_basic,
    check_dct_simon,
    coherent_info_family,
    entropy_family,
    g_c_linear,
    laa_check,
    output_entropy_family,
    truncation_lower_bound_slack,
    relative_entropy_domination,
    relative_entropy_family,
    relative_entropy_sum,
    trace_neg_log_family,
    truncation_criterion,
)
from .scenarios import (
    BUILTIN_SCENARIOS,
    FUZZ_SUITES,
    Scenario,
    ScenarioError,
    builtin_scenario,
    inequality_fuzz,
    load_scenario,
    random_channel,
    random_density,
    random_positive,
    random_projector,
    random_unitary,
    report_to_csv,
    report_to_json,
    run_scenario,
)

__version__ = "0.1.0"
