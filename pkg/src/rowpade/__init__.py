"""Row sequences of Pade-type rational approximants with convergence diagnostics.

Construct classical, incomplete, and simultaneous (vector) rational
approximants from formal power series; sweep rows of them; and measure
where and how fast they converge: disk radii from telescoping constants,
pole indicators from denominator zeros, sup-norm error rates on
pole-excluded compacts, and denominator coefficient convergence.
"""

from .exceptions import (
    EmptyCompactError,
    EvaluationDomainError,
    ExactValueNeeded,
    InsufficientData,
    MixedModeError,
    NumericError,
    RootFindingError,
    RowPadeError,
    TelescopingError,
    UncertainCancellation,
    UsageError,
)
from .hermite import HermitePadeApproximant, MultiIndex, component_view, compute_hermite
from .numerics import (
    CanonicalForm,
    Polynomial,
    Root,
    RootSet,
    canonicalize,
    gcd_reduce,
    nullspace_vector,
    roots,
)
from .pade import (
    PadeApproximant,
    compute_incomplete,
    compute_pade,
    linearization_order,
    reduce_and_normalize,
)
from .rows import (
    CompactSet,
    ComponentAnalysis,
    IndicatorReport,
    RadiusEstimate,
    RateFit,
    RowSequence,
    ScalarRowSpec,
    SystemRowSpec,
    TelescopeTerm,
    assign_k,
    build_row,
    circle_compact,
    coeff_norm_diff,
    consecutive_differences,
    delta_indicator,
    delta_j_indicators,
    denominator_rate,
    estimate_rstar,
    fit_rate,
    indicator_report,
    mu_indicator,
    scalar_row,
    sup_error,
    sup_error_rate,
    system_row,
    telescope,
)
from .scalars import Context, Exact, LogConstant, exact, parse_exact
from .series import (
    PowerSeries,
    ReferenceAnalytics,
    SystemOfSeries,
    catalog,
    list_catalog,
    log_shift_series,
    parse_series_spec,
    rational_series,
)

__version__ = "0.1.0"
